#include "nkconf/homology.hpp"

#include <algorithm>
#include <ostream>

#include <json.hpp>

#include "nkconf/parallel.hpp"

namespace nkconf {

sparse_matrix boundary_matrix(const complex_view& cv, int d, coeff_field f) {
    if (d < 1) throw input_error("boundary defined for dimension >= 1");
    for (const auto& e : cv.underlying().edges())
        if (e.is_loop()) throw input_error("boundary matrix needs a loop-free graph");

    sparse_matrix m;
    m.rows = static_cast<int>(cv.count(d - 1));
    m.cols = static_cast<int>(cv.count(d));
    m.columns.assign(static_cast<std::size_t>(m.cols), {});

    parallel_for(static_cast<std::size_t>(m.cols), [&](std::size_t j) {
        const resolved_cell& rx = cv.resolved(d, static_cast<int>(j));
        auto& col = m.columns[j];
        int edge_rank = 0;
        for (std::size_t t = 0; t < rx.size(); ++t) {
            if (!cv.item_is_edge(rx[t])) continue;
            const edge_record& e = cv.item_edge(rx[t]);
            std::int64_t sign = (edge_rank % 2 == 0) ? 1 : -1;
            resolved_cell face = rx;
            face[t] = cv.vertex_item(e.u);  // source: smaller endpoint label
            int src_row = cv.index_of(face, d - 1);
            face[t] = cv.vertex_item(e.v);
            int tgt_row = cv.index_of(face, d - 1);
            if (src_row < 0 || tgt_row < 0)
                throw verification_error("face missing from complex",
                                         cell_key(cv.materialize(rx)));
            col.emplace_back(src_row, sign);
            col.emplace_back(tgt_row, -sign);
            ++edge_rank;
        }
        std::sort(col.begin(), col.end());
        if (f == coeff_field::mod2)
            for (auto& entry : col) entry.second = 1;
    });
    return m;
}

namespace {

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// Integer-preserving elimination on primitive rows: each update combines
// gcd-reduced multiples of the row and the pivot row and then divides out
// the row content, so no fractions ever appear and row scaling never
// changes the rank. int64 with __int128 intermediates and a loud overflow
// check. Pivot rows are taken shortest first, which keeps fill and entry
// growth low on incidence-like input.
long rank_rational(const sparse_matrix& m) {
    using row_t = std::vector<std::pair<std::int32_t, std::int64_t>>;  // (col, val)
    std::vector<row_t> rows(static_cast<std::size_t>(m.rows));
    std::vector<std::vector<std::int32_t>> rows_in_col(static_cast<std::size_t>(m.cols));
    for (std::int32_t j = 0; j < m.cols; ++j)
        for (const auto& [r, v] : m.columns[static_cast<std::size_t>(j)])
            if (v != 0) rows[static_cast<std::size_t>(r)].emplace_back(j, v);

    auto normalize = [](row_t& row) {
        std::int64_t content = 0;
        for (const auto& [c, v] : row) content = gcd64(content, v);
        if (content > 1)
            for (auto& [c, v] : row) v /= content;
    };
    for (auto& row : rows) normalize(row);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (const auto& [c, v] : rows[r])
            rows_in_col[static_cast<std::size_t>(c)].push_back(static_cast<std::int32_t>(r));

    auto checked = [](__int128 x) -> std::int64_t {
        if (x > INT64_MAX || x < INT64_MIN)
            throw error("integer overflow in exact elimination");
        return static_cast<std::int64_t>(x);
    };

    // min-heap of (row length, row); stale lengths are skipped on pop
    auto cmp = [](const std::pair<std::size_t, std::int32_t>& a,
                  const std::pair<std::size_t, std::int32_t>& b) { return a > b; };
    std::vector<std::pair<std::size_t, std::int32_t>> heap;
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (!rows[r].empty()) heap.emplace_back(rows[r].size(), static_cast<std::int32_t>(r));
    std::make_heap(heap.begin(), heap.end(), cmp);
    std::vector<char> eliminated(rows.size(), 0);

    long rank = 0;
    while (!heap.empty()) {
        std::pop_heap(heap.begin(), heap.end(), cmp);
        auto [len, pr] = heap.back();
        heap.pop_back();
        auto& prow = rows[static_cast<std::size_t>(pr)];
        if (eliminated[static_cast<std::size_t>(pr)] || prow.empty() || prow.size() != len)
            continue;  // stale entry
        // inside the pivot row, prefer the column met by fewest rows
        std::int32_t pc = prow.front().first;
        std::size_t best = SIZE_MAX;
        for (const auto& [c, v] : prow) {
            std::size_t cc = rows_in_col[static_cast<std::size_t>(c)].size();
            if (cc < best) {
                best = cc;
                pc = c;
            }
        }
        std::int64_t pv = 0;
        for (const auto& [c, v] : prow)
            if (c == pc) pv = v;
        const row_t pivot_row = prow;
        eliminated[static_cast<std::size_t>(pr)] = 1;
        ++rank;

        std::vector<std::int32_t> victims;
        rows_in_col[static_cast<std::size_t>(pc)].swap(victims);
        for (std::int32_t r : victims) {
            if (r == pr || eliminated[static_cast<std::size_t>(r)]) continue;
            auto& row = rows[static_cast<std::size_t>(r)];
            std::int64_t at_pc = 0;
            for (const auto& [c, v] : row)
                if (c == pc) at_pc = v;
            if (at_pc == 0) continue;  // stale column membership
            const std::int64_t g = gcd64(pv, at_pc);
            const std::int64_t mult_row = pv / g, mult_piv = at_pc / g;
            row_t next;
            next.reserve(row.size() + pivot_row.size());
            auto it = row.cbegin();
            auto pe = pivot_row.cbegin();
            while (it != row.end() || pe != pivot_row.end()) {
                std::int32_t col;
                __int128 val;
                if (pe == pivot_row.end() || (it != row.end() && it->first < pe->first)) {
                    col = it->first;
                    val = static_cast<__int128>(it->second) * mult_row;
                    ++it;
                } else if (it == row.end() || pe->first < it->first) {
                    col = pe->first;
                    val = -static_cast<__int128>(mult_piv) * pe->second;
                    ++pe;
                } else {
                    col = it->first;
                    val = static_cast<__int128>(it->second) * mult_row -
                          static_cast<__int128>(mult_piv) * pe->second;
                    ++it;
                    ++pe;
                }
                if (col == pc || val == 0) continue;
                next.emplace_back(col, checked(val));
            }
            normalize(next);
            for (const auto& [c, v] : next) {
                bool had = false;
                for (const auto& [oc, ov] : row)
                    if (oc == c) had = true;
                if (!had) rows_in_col[static_cast<std::size_t>(c)].push_back(r);
            }
            row = std::move(next);
            if (!row.empty()) {
                heap.emplace_back(row.size(), r);
                std::push_heap(heap.begin(), heap.end(), cmp);
            }
        }
    }
    return rank;
}

long rank_mod2(const sparse_matrix& m) {
    // columns as sorted row-index vectors; reduce against the column owning
    // the current low entry
    std::vector<std::vector<std::int32_t>> cols(static_cast<std::size_t>(m.cols));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        for (const auto& [r, v] : m.columns[j])
            if (v % 2 != 0) cols[j].push_back(r);
        std::sort(cols[j].begin(), cols[j].end());
        // repeated rows cancel in pairs
        std::vector<std::int32_t> clean;
        for (std::size_t i = 0; i < cols[j].size();) {
            std::size_t run = i;
            while (run < cols[j].size() && cols[j][run] == cols[j][i]) ++run;
            if ((run - i) % 2 != 0) clean.push_back(cols[j][i]);
            i = run;
        }
        cols[j] = std::move(clean);
    }
    std::vector<std::int32_t> owner(static_cast<std::size_t>(m.rows), -1);
    long rank = 0;
    std::vector<std::int32_t> merged;
    for (std::size_t j = 0; j < cols.size(); ++j) {
        auto& col = cols[j];
        while (!col.empty()) {
            std::int32_t low = col.back();
            std::int32_t other = owner[static_cast<std::size_t>(low)];
            if (other < 0) {
                owner[static_cast<std::size_t>(low)] = static_cast<std::int32_t>(j);
                ++rank;
                break;
            }
            // symmetric difference with the owning column
            const auto& oc = cols[static_cast<std::size_t>(other)];
            merged.clear();
            std::set_symmetric_difference(col.begin(), col.end(), oc.begin(), oc.end(),
                                          std::back_inserter(merged));
            col.swap(merged);
        }
    }
    return rank;
}

} // namespace

long matrix_rank(const sparse_matrix& m, coeff_field f) {
    return f == coeff_field::rational ? rank_rational(m) : rank_mod2(m);
}

std::vector<long> betti_numbers(const complex_view& cv, coeff_field f, long* euler_out) {
    int maxd = cv.max_dim();
    std::vector<long> ranks(static_cast<std::size_t>(maxd) + 2, 0);
    for (int d = 1; d <= maxd; ++d)
        ranks[static_cast<std::size_t>(d)] = matrix_rank(boundary_matrix(cv, d, f), f);
    std::vector<long> betti(static_cast<std::size_t>(maxd) + 1, 0);
    for (int d = 0; d <= maxd; ++d)
        betti[static_cast<std::size_t>(d)] = static_cast<long>(cv.count(d)) -
                                             ranks[static_cast<std::size_t>(d)] -
                                             ranks[static_cast<std::size_t>(d) + 1];
    long chi = euler_characteristic(cv);
    long chi_betti = 0;
    for (int d = 0; d <= maxd; ++d)
        chi_betti += (d % 2 == 0 ? 1 : -1) * betti[static_cast<std::size_t>(d)];
    if (chi != chi_betti)
        throw verification_error("Euler characteristic mismatch: cells give " +
                                 std::to_string(chi) + ", Betti give " +
                                 std::to_string(chi_betti));
    if (euler_out) *euler_out = chi;
    return betti;
}

long euler_characteristic(const complex_view& cv) {
    long chi = 0;
    for (int d = 0; d <= cv.max_dim(); ++d)
        chi += (d % 2 == 0 ? 1 : -1) * static_cast<long>(cv.count(d));
    return chi;
}

void write_triplets(std::ostream& out, const sparse_matrix& m) {
    out << m.rows << " " << m.cols << " " << m.nnz() << "\n";
    for (std::size_t j = 0; j < m.columns.size(); ++j)
        for (const auto& [r, v] : m.columns[j]) out << r << " " << j << " " << v << "\n";
}

std::string betti_json(const std::vector<long>& betti, coeff_field f, long euler) {
    nlohmann::json j;
    j["coeff"] = field_name(f);
    j["betti"] = betti;
    j["euler"] = euler;
    return j.dump();
}

bool betti_equal(const std::vector<long>& a, const std::vector<long>& b) {
    std::size_t len = std::max(a.size(), b.size());
    for (std::size_t i = 0; i < len; ++i) {
        long ai = i < a.size() ? a[i] : 0;
        long bi = i < b.size() ? b[i] : 0;
        if (ai != bi) return false;
    }
    return true;
}

} // namespace nkconf
