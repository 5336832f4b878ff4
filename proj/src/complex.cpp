#include "nkconf/complex.hpp"

#include <algorithm>
#include <ostream>

#include <json.hpp>

namespace nkconf {

namespace {

bool key_less(const cell& a, const cell& b) { return cell_key(a) < cell_key(b); }

} // namespace

std::size_t complex_view::total() const {
    std::size_t s = 0;
    for (const auto& d : by_dim_) s += d.size();
    return s;
}

std::size_t complex_view::count(int dim) const {
    if (dim < 0 || dim > max_dim()) return 0;
    return by_dim_[static_cast<std::size_t>(dim)].size();
}

std::vector<std::size_t> complex_view::dim_counts() const {
    std::vector<std::size_t> out;
    for (const auto& d : by_dim_) out.push_back(d.size());
    return out;
}

const std::vector<cell>& complex_view::cells(int dim) const {
    static const std::vector<cell> empty;
    if (dim < 0 || dim > max_dim()) return empty;
    return by_dim_[static_cast<std::size_t>(dim)];
}

item_id complex_view::resolve(const coord& c) const {
    int i = c.is_edge ? graph_.edge_index(c.label) : graph_.vertex_index(c.label);
    if (i < 0) return -1;
    return c.is_edge ? static_cast<item_id>(graph_.num_vertices()) + i : i;
}

int complex_view::index_of(const resolved_cell& rx, int dim) const {
    if (dim < 0 || dim > max_dim()) return -1;
    auto it = index_[static_cast<std::size_t>(dim)].find(rx);
    return it == index_[static_cast<std::size_t>(dim)].end() ? -1 : it->second;
}

std::optional<std::pair<int, int>> complex_view::find(const cell& x) const {
    resolved_cell rx;
    rx.reserve(x.size());
    for (const auto& c : x) {
        item_id v = resolve(c);
        if (v < 0) return std::nullopt;
        rx.push_back(v);
    }
    int d = dimension(x);
    int idx = index_of(rx, d);
    if (idx < 0) return std::nullopt;
    return std::make_pair(d, idx);
}

cell complex_view::materialize(const resolved_cell& rx) const {
    cell x;
    x.reserve(rx.size());
    for (item_id v : rx) {
        if (item_is_edge(v))
            x.push_back(edg(item_edge(v).id));
        else
            x.push_back(vtx(graph_.vertices()[static_cast<std::size_t>(v)]));
    }
    return x;
}

std::vector<std::pair<int, resolved_cell>> complex_view::resolved_faces(
    const resolved_cell& rx) const {
    std::vector<std::pair<int, resolved_cell>> out;
    for (std::size_t t = 0; t < rx.size(); ++t) {
        if (!item_is_edge(rx[t])) continue;
        const edge_record& e = item_edge(rx[t]);
        resolved_cell f = rx;
        f[t] = graph_.vertex_index(e.u);
        out.emplace_back(static_cast<int>(t), f);
        if (!e.is_loop()) {
            f[t] = graph_.vertex_index(e.v);
            out.emplace_back(static_cast<int>(t), std::move(f));
        }
    }
    return out;
}

void complex_view::build_index() {
    resolved_.assign(by_dim_.size(), {});
    index_.assign(by_dim_.size(), {});
    for (std::size_t d = 0; d < by_dim_.size(); ++d) {
        resolved_[d].reserve(by_dim_[d].size());
        for (std::size_t i = 0; i < by_dim_[d].size(); ++i) {
            resolved_cell rx;
            rx.reserve(by_dim_[d][i].size());
            for (const auto& c : by_dim_[d][i]) rx.push_back(resolve(c));
            index_[d].emplace(rx, static_cast<std::int32_t>(i));
            resolved_[d].push_back(std::move(rx));
        }
    }
}

complex_view complex_view::from_cells(graph g, int k, int n, std::vector<cell> cells) {
    if (k < 2 || k > n) throw input_error("need 2 <= k <= n");
    complex_view cv;
    cv.graph_ = std::move(g);
    cv.k_ = k;
    cv.n_ = n;
    int maxd = 0;
    for (const auto& x : cells) {
        if (static_cast<int>(x.size()) != n)
            throw input_error("cell arity " + std::to_string(x.size()) + " != n");
        require_cell_over(cv.graph_, x);
        if (!is_dconf_cell(cv.graph_, k, x))
            throw verification_error("cell violates the collision bound", cell_key(x));
        maxd = std::max(maxd, dimension(x));
    }
    cv.by_dim_.assign(static_cast<std::size_t>(maxd) + 1, {});
    for (auto& x : cells) cv.by_dim_[static_cast<std::size_t>(dimension(x))].push_back(std::move(x));
    for (auto& dim_cells : cv.by_dim_) {
        std::sort(dim_cells.begin(), dim_cells.end(), key_less);
        dim_cells.erase(std::unique(dim_cells.begin(), dim_cells.end()), dim_cells.end());
    }
    cv.build_index();
    // closure under codim-1 faces
    for (int d = maxd; d >= 1; --d) {
        for (const auto& rx : cv.resolved_[static_cast<std::size_t>(d)]) {
            for (const auto& [t, f] : cv.resolved_faces(rx)) {
                (void)t;
                if (cv.index_of(f, d - 1) < 0)
                    throw verification_error("cell set is not face-closed",
                                             cell_key(cv.materialize(f)));
            }
        }
    }
    return cv;
}

namespace {

struct dfs_enumerator {
    const graph& g;
    int k, n;
    std::size_t budget;
    std::vector<int> closure_count;           // per vertex index
    resolved_cell partial;
    std::vector<std::vector<resolved_cell>> out;  // per dimension
    std::size_t emitted = 0;

    dfs_enumerator(const graph& g_, int k_, int n_, std::size_t budget_)
        : g(g_), k(k_), n(n_), budget(budget_), closure_count(g_.num_vertices(), 0) {
        out.resize(static_cast<std::size_t>(n_) + 1);
    }

    // vertices touched by item (an edge touches both endpoints, a loop one)
    int touched(item_id item, int slot[2]) const {
        if (item < static_cast<item_id>(g.num_vertices())) {
            slot[0] = item;
            return 1;
        }
        const edge_record& e = g.edges()[static_cast<std::size_t>(item) - g.num_vertices()];
        slot[0] = g.vertex_index(e.u);
        if (e.is_loop()) return 1;
        slot[1] = g.vertex_index(e.v);
        return 2;
    }

    void run(int depth, int dim) {
        if (depth == n) {
            if (++emitted > budget)
                throw budget_error("cell budget exceeded at " + std::to_string(budget) +
                                       " cells",
                                   budget);
            out[static_cast<std::size_t>(dim)].push_back(partial);
            return;
        }
        const item_id items = static_cast<item_id>(g.num_vertices() + g.num_edges());
        for (item_id item = 0; item < items; ++item) {
            int slot[2];
            int nt = touched(item, slot);
            bool fits = true;
            for (int j = 0; j < nt; ++j)
                if (closure_count[static_cast<std::size_t>(slot[j])] + 1 > k - 1) fits = false;
            if (!fits) continue;
            for (int j = 0; j < nt; ++j) ++closure_count[static_cast<std::size_t>(slot[j])];
            partial.push_back(item);
            run(depth + 1, dim + (item >= static_cast<item_id>(g.num_vertices())));
            partial.pop_back();
            for (int j = 0; j < nt; ++j) --closure_count[static_cast<std::size_t>(slot[j])];
        }
    }
};

} // namespace

complex_view enumerate_dconf(const graph& g, int k, int n, std::size_t cell_budget) {
    if (k < 2 || k > n) throw input_error("need 2 <= k <= n");
    if (!g.connected()) throw input_error("enumeration requires a connected graph");
    if (cell_budget == 0) throw input_error("cell budget must be positive");

    dfs_enumerator dfs(g, k, n, cell_budget);
    dfs.run(0, 0);

    complex_view cv;
    cv.graph_ = g;
    cv.k_ = k;
    cv.n_ = n;
    int maxd = 0;
    for (std::size_t d = 0; d < dfs.out.size(); ++d)
        if (!dfs.out[d].empty()) maxd = static_cast<int>(d);
    cv.by_dim_.assign(static_cast<std::size_t>(maxd) + 1, {});
    for (int d = 0; d <= maxd; ++d) {
        auto& dst = cv.by_dim_[static_cast<std::size_t>(d)];
        dst.reserve(dfs.out[static_cast<std::size_t>(d)].size());
        for (const auto& rx : dfs.out[static_cast<std::size_t>(d)]) {
            cell x;
            x.reserve(rx.size());
            for (item_id v : rx) {
                if (v < static_cast<item_id>(g.num_vertices()))
                    x.push_back(vtx(g.vertices()[static_cast<std::size_t>(v)]));
                else
                    x.push_back(edg(g.edges()[static_cast<std::size_t>(v) - g.num_vertices()].id));
            }
            dst.push_back(std::move(x));
        }
        std::sort(dst.begin(), dst.end(), key_less);
    }
    cv.build_index();
    return cv;
}

void write_cell_stream(std::ostream& out, const complex_view& cv) {
    nlohmann::json header;
    header["g"] = graph_hash(cv.underlying());
    header["k"] = cv.k();
    header["n"] = cv.n();
    header["counts"] = cv.dim_counts();
    out << header.dump() << "\n";
    for (int d = 0; d <= cv.max_dim(); ++d)
        for (const auto& x : cv.cells(d)) out << cell_key(x) << "\n";
}

} // namespace nkconf
