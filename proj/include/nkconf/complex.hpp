#ifndef NKCONF_COMPLEX_HPP
#define NKCONF_COMPLEX_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

#include "nkconf/cell.hpp"
#include "nkconf/graph.hpp"

namespace nkconf {

// Items of a fixed graph, encoded as ints: vertex i -> i, edge j -> |V| + j.
using item_id = std::int32_t;
using resolved_cell = std::vector<item_id>;

struct resolved_cell_hash {
    std::size_t operator()(const resolved_cell& x) const {
        std::uint64_t h = 1469598103934665603ull;
        for (item_id v : x) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

// The cells of DConf^k(G, n) (or a subcomplex of it), grouped by dimension.
// Immutable once built; cells within a dimension are sorted by canonical key.
class complex_view {
public:
    complex_view() = default;

    // Validates every cell (membership and closure under codim-1 faces).
    static complex_view from_cells(graph g, int k, int n, std::vector<cell> cells);

    const graph& underlying() const { return graph_; }
    int k() const { return k_; }
    int n() const { return n_; }
    int max_dim() const { return static_cast<int>(by_dim_.size()) - 1; }

    std::size_t total() const;
    std::size_t count(int dim) const;
    std::vector<std::size_t> dim_counts() const;
    const std::vector<cell>& cells(int dim) const;

    bool contains(const cell& x) const { return find(x).has_value(); }
    std::optional<std::pair<int, int>> find(const cell& x) const;  // (dim, index)

    // Fast paths on the int encoding.
    const resolved_cell& resolved(int dim, int idx) const { return resolved_[dim][idx]; }
    item_id resolve(const coord& c) const;  // -1 if not an item of the graph
    int index_of(const resolved_cell& rx, int dim) const;  // -1 if absent
    bool item_is_edge(item_id v) const { return v >= static_cast<item_id>(graph_.num_vertices()); }
    const edge_record& item_edge(item_id v) const {
        return graph_.edges()[static_cast<std::size_t>(v) - graph_.num_vertices()];
    }
    item_id vertex_item(const std::string& label) const { return graph_.vertex_index(label); }
    cell materialize(const resolved_cell& rx) const;

    // Codim-1 faces of a resolved cell: (coordinate, face). Loop coordinates
    // contribute a single face.
    std::vector<std::pair<int, resolved_cell>> resolved_faces(const resolved_cell& rx) const;

private:
    friend complex_view enumerate_dconf(const graph&, int, int, std::size_t);
    void build_index();

    graph graph_;
    int k_ = 0, n_ = 0;
    std::vector<std::vector<cell>> by_dim_;
    std::vector<std::vector<resolved_cell>> resolved_;
    std::vector<std::unordered_map<resolved_cell, std::int32_t, resolved_cell_hash>> index_;
};

constexpr std::size_t default_cell_budget = 10'000'000;

// Depth-first enumeration of all DConf^k(g, n) cells with pruning on partial
// closure counts. Throws budget_error instead of truncating.
complex_view enumerate_dconf(const graph& g, int k, int n,
                             std::size_t cell_budget = default_cell_budget);

// Header line {"g": hash, "k":, "n":, "counts": [...]} followed by one
// canonical cell per line.
void write_cell_stream(std::ostream& out, const complex_view& cv);

} // namespace nkconf

#endif
