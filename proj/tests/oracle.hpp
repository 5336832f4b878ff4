// Independent oracles for the test suite. Everything here recomputes results
// from first principles (exhaustive tuple filtering, dense elimination) and
// deliberately avoids the library's enumeration, sparse-rank and pairing
// code paths.
#ifndef NKCONF_TESTS_ORACLE_HPP
#define NKCONF_TESTS_ORACLE_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nkconf/cell.hpp"
#include "nkconf/graph.hpp"

namespace oracle {

// eta(v, closure(x)) by direct scan of the set definition
inline int eta_closure(const nkconf::graph& g, const nkconf::cell& x, const std::string& v) {
    int count = 0;
    for (const auto& c : x) {
        if (!c.is_edge) {
            count += (c.label == v);
        } else {
            const auto& e = g.edge(c.label);
            count += (e.u == v || e.v == v);
        }
    }
    return count;
}

inline bool dconf_member(const nkconf::graph& g, int k, const nkconf::cell& x) {
    for (const auto& v : g.vertices())
        if (eta_closure(g, x, v) > k - 1) return false;
    return true;
}

// every n-tuple over V and E, filtered by the membership test
inline std::vector<nkconf::cell> brute_force_cells(const nkconf::graph& g, int k, int n) {
    std::vector<nkconf::coord> items;
    for (const auto& v : g.vertices()) items.push_back(nkconf::vtx(v));
    for (const auto& e : g.edges()) items.push_back(nkconf::edg(e.id));
    std::vector<nkconf::cell> out;
    std::vector<std::size_t> odo(static_cast<std::size_t>(n), 0);
    for (;;) {
        nkconf::cell x;
        for (int t = 0; t < n; ++t) x.push_back(items[odo[static_cast<std::size_t>(t)]]);
        if (dconf_member(g, k, x)) out.push_back(std::move(x));
        int t = n - 1;
        while (t >= 0 && ++odo[static_cast<std::size_t>(t)] == items.size())
            odo[static_cast<std::size_t>(t--)] = 0;
        if (t < 0) break;
    }
    return out;
}

inline std::vector<std::size_t> counts_by_dim(const std::vector<nkconf::cell>& cells) {
    std::vector<std::size_t> counts;
    for (const auto& x : cells) {
        std::size_t d = static_cast<std::size_t>(nkconf::dimension(x));
        if (counts.size() <= d) counts.resize(d + 1, 0);
        ++counts[d];
    }
    return counts;
}

inline std::set<std::string> key_set(const std::vector<nkconf::cell>& cells) {
    std::set<std::string> out;
    for (const auto& x : cells) out.insert(nkconf::cell_key(x));
    return out;
}

// dense fraction-free elimination, rank over the rationals
inline long dense_rank_q(std::vector<std::vector<std::int64_t>> a) {
    if (a.empty() || a[0].empty()) return 0;
    std::size_t rows = a.size(), cols = a[0].size();
    long rank = 0;
    std::int64_t prev = 1;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t pivot = row;
        while (pivot < rows && a[pivot][col] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(a[pivot], a[row]);
        for (std::size_t r = row + 1; r < rows; ++r) {
            for (std::size_t c = col + 1; c < cols; ++c)
                a[r][c] = (a[r][c] * a[row][col] - a[r][col] * a[row][c]) / prev;
            a[r][col] = 0;
        }
        prev = a[row][col];
        ++row;
        ++rank;
    }
    return rank;
}

inline long dense_rank_f2(std::vector<std::vector<std::int64_t>> a) {
    if (a.empty() || a[0].empty()) return 0;
    for (auto& r : a)
        for (auto& v : r) v = ((v % 2) + 2) % 2;
    std::size_t rows = a.size(), cols = a[0].size();
    long rank = 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t pivot = row;
        while (pivot < rows && a[pivot][col] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(a[pivot], a[row]);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == row || a[r][col] == 0) continue;
            for (std::size_t c = col; c < cols; ++c) a[r][c] ^= a[row][c];
        }
        ++row;
        ++rank;
    }
    return rank;
}

// dense boundary matrix straight from the sign convention, keyed by cell key
inline std::vector<std::vector<std::int64_t>> dense_boundary(
    const nkconf::graph& g, const std::vector<nkconf::cell>& cells, int d) {
    std::vector<nkconf::cell> lower, upper;
    for (const auto& x : cells) {
        if (nkconf::dimension(x) == d - 1) lower.push_back(x);
        if (nkconf::dimension(x) == d) upper.push_back(x);
    }
    auto by_key = [](const nkconf::cell& p, const nkconf::cell& q) {
        return nkconf::cell_key(p) < nkconf::cell_key(q);
    };
    std::sort(lower.begin(), lower.end(), by_key);
    std::sort(upper.begin(), upper.end(), by_key);
    std::map<std::string, std::size_t> row_of;
    for (std::size_t i = 0; i < lower.size(); ++i) row_of[nkconf::cell_key(lower[i])] = i;
    std::vector<std::vector<std::int64_t>> mat(lower.size(),
                                               std::vector<std::int64_t>(upper.size(), 0));
    for (std::size_t j = 0; j < upper.size(); ++j) {
        int edge_rank = 0;
        for (std::size_t t = 0; t < upper[j].size(); ++t) {
            if (!upper[j][t].is_edge) continue;
            const auto& e = g.edge(upper[j][t].label);
            std::int64_t sign = (edge_rank % 2 == 0) ? 1 : -1;
            nkconf::cell f = upper[j];
            f[t] = nkconf::vtx(e.u);
            mat[row_of.at(nkconf::cell_key(f))][j] += sign;
            f[t] = nkconf::vtx(e.v);
            mat[row_of.at(nkconf::cell_key(f))][j] -= sign;
            ++edge_rank;
        }
    }
    return mat;
}

// Betti numbers from dense ranks over the chosen field
inline std::vector<long> dense_betti(const nkconf::graph& g,
                                     const std::vector<nkconf::cell>& cells, bool mod2) {
    std::vector<std::size_t> counts = counts_by_dim(cells);
    int maxd = static_cast<int>(counts.size()) - 1;
    std::vector<long> ranks(static_cast<std::size_t>(maxd) + 2, 0);
    for (int d = 1; d <= maxd; ++d) {
        auto mat = dense_boundary(g, cells, d);
        ranks[static_cast<std::size_t>(d)] = mod2 ? dense_rank_f2(mat) : dense_rank_q(mat);
    }
    std::vector<long> betti(static_cast<std::size_t>(maxd) + 1, 0);
    for (int d = 0; d <= maxd; ++d)
        betti[static_cast<std::size_t>(d)] = static_cast<long>(counts[static_cast<std::size_t>(d)]) -
                                             ranks[static_cast<std::size_t>(d)] -
                                             ranks[static_cast<std::size_t>(d) + 1];
    return betti;
}

// deflation by definition: a 5-way product over the a-coordinates
inline std::set<std::string> deflate_by_definition(const nkconf::cell& x, const std::string& a,
                                                   const std::string& v1, const std::string& w,
                                                   const std::string& vi1, const std::string& e1,
                                                   const std::string& ei1) {
    std::vector<nkconf::cell> acc{nkconf::cell{}};
    std::vector<nkconf::coord> options = {nkconf::vtx(v1), nkconf::vtx(w), nkconf::vtx(vi1),
                                          nkconf::edg(e1), nkconf::edg(ei1)};
    for (const auto& c : x) {
        if (c.is_edge && c.label == a) {
            std::vector<nkconf::cell> next;
            for (const auto& partial : acc)
                for (const auto& opt : options) {
                    next.push_back(partial);
                    next.back().push_back(opt);
                }
            acc = std::move(next);
        } else {
            for (auto& partial : acc) partial.push_back(c);
        }
    }
    std::set<std::string> keys;
    for (const auto& xp : acc) keys.insert(nkconf::cell_key(xp));
    return keys;
}

} // namespace oracle

#endif
