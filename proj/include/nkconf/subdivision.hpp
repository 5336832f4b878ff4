#ifndef NKCONF_SUBDIVISION_HPP
#define NKCONF_SUBDIVISION_HPP

#include <set>
#include <string>
#include <vector>

#include "nkconf/complex.hpp"
#include "nkconf/graph.hpp"

namespace nkconf {

struct oriented_edge {
    std::string id;
    std::string source, target;
};

enum class h_case { path, cycle };

// Everything one subdivision event G -> G(w, uv) determines: the primitive
// path or cycle H carrying the insertion, its labeled vertices v_1..v_l and
// oriented edges e_1..e_l, the insertion index i, and the rank bound ell.
//
// Labeling: a = v_1 v_{i+1} is the replaced edge, v_1 its endpoint with the
// smaller label; e_1 = w->v_1, e_{i+1} = w->v_{i+1}, e_s = v_{s-1}->v_s
// otherwise. In the cycle case v_i = v_l is the unique primitive vertex on
// the cycle and ell = l-1; on a path ell = l.
struct subdivision_context {
    graph base;        // G
    graph subdivided;  // G' = G(w, a)
    std::string w;
    std::string a;  // replaced edge id (an edge of base, absent in subdivided)
    h_case hcase = h_case::path;
    std::vector<std::string> labels;   // v_1..v_l
    std::vector<oriented_edge> edges;  // e_1..e_l
    int i = 0;                         // 1-based insertion index
    int l = 0;
    int ell = 0;

    const std::string& v(int s) const { return labels[static_cast<std::size_t>(s - 1)]; }
    const oriented_edge& e(int s) const { return edges[static_cast<std::size_t>(s - 1)]; }
    const std::string& v1() const { return v(1); }
    const std::string& vi1() const { return v(i + 1); }
    std::set<std::string> h_edge_ids() const;
    std::string to_json_text() const;
};

// Inserts w on the given edge; the edge is replaced by two fresh edges
// (ids "<edge>:1" at the smaller endpoint, "<edge>:2" at the larger).
graph subdivide_edge(const graph& g, const std::string& edge_id, const std::string& w);

// Recovers the subdivision event from the pair (g, g_sub) and produces the
// full labeling. Throws input_error when g_sub is not a single-vertex
// subdivision of g at w.
subdivision_context locate_h(const graph& g, const graph& g_sub, const std::string& w);

// All cells obtained by independently replacing each coordinate equal to a
// by one of v_1, w, v_{i+1}, e_1, e_{i+1}; sorted by canonical key. The input
// must be a DConf^k(base, n) cell.
std::vector<cell> deflate(const cell& x, const subdivision_context& ctx, int k);

// Coordinates in {w, e_1, e_{i+1}} become a; all others are unchanged.
cell inflate(const cell& xp, const subdivision_context& ctx);

// The subcomplex of DConf^k(G', n) swept out by deflation. Face-closed.
complex_view build_y(const subdivision_context& ctx, int k, int n,
                     std::size_t cell_budget = default_cell_budget);
complex_view build_y(const subdivision_context& ctx, const complex_view& base_cv);

// True iff the inflation of xp acquires a k-fold collision. Both the
// inflation route and the closure-count inequalities are evaluated and must
// agree. xp must be a DConf^k(G', n) cell.
bool is_external(const cell& xp, const subdivision_context& ctx, int k);

// One midpoint on every edge, performed as a sequence of single insertions.
graph barycentric_subdivision(const graph& g);

} // namespace nkconf

#endif
