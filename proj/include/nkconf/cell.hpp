#ifndef NKCONF_CELL_HPP
#define NKCONF_CELL_HPP

#include <set>
#include <string>
#include <vector>

#include "nkconf/graph.hpp"

namespace nkconf {

// One coordinate of a product cell: a vertex label or an edge label.
// Coordinates store labels rather than indices so that cells stay meaningful
// across subdivision events.
struct coord {
    bool is_edge = false;
    std::string label;

    friend bool operator==(const coord& a, const coord& b) {
        return a.is_edge == b.is_edge && a.label == b.label;
    }
    friend bool operator!=(const coord& a, const coord& b) { return !(a == b); }
    friend bool operator<(const coord& a, const coord& b) {
        if (a.is_edge != b.is_edge) return a.is_edge > b.is_edge;  // "e:" sorts before "v:"
        return a.label < b.label;
    }
};

inline coord vtx(std::string label) { return {false, std::move(label)}; }
inline coord edg(std::string label) { return {true, std::move(label)}; }

// A cell of the product structure on G^n: one coordinate per factor.
using cell = std::vector<coord>;

inline int dimension(const cell& x) {
    int d = 0;
    for (const auto& c : x) d += c.is_edge;
    return d;
}

// Canonical serialization, e.g. "e:qr|v:p". Used as hash key and wire format.
std::string cell_key(const cell& x);
cell parse_cell(const std::string& text);

// Throws input_error unless every coordinate names a vertex/edge of g.
void require_cell_over(const graph& g, const cell& x);

enum class eta_mode { at, closure };

// eta(item, x) for mode `at`, eta(v, closure(x)) for mode `closure`.
// Closure mode requires a vertex item.
int eta(const graph& g, const cell& x, const coord& item, eta_mode mode);

// Membership in DConf^k(g, n): every vertex is touched by at most k-1
// coordinate closures.
bool is_dconf_cell(const graph& g, int k, const cell& x);

// The codimension-1 faces: per edge coordinate, the cells obtained by
// replacing it with each endpoint (one cell for a loop). Pairs are
// (coordinate index, face), coordinate indices 0-based ascending.
std::vector<std::pair<int, cell>> codim1_faces(const graph& g, const cell& x);

// Number of coordinates that are edges incident to v and not excluded.
int ext_count(const graph& g, const cell& x, const std::string& v,
              const std::set<std::string>& excluded_edges);

} // namespace nkconf

#endif
