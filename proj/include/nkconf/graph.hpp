#ifndef NKCONF_GRAPH_HPP
#define NKCONF_GRAPH_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "nkconf/errors.hpp"

namespace nkconf {

// One edge of a multigraph. Endpoints are stored sorted (u <= v); a loop has u == v.
struct edge_record {
    std::string id;
    std::string u, v;
    bool is_loop() const { return u == v; }
};

// Finite multigraph with labeled vertices and labeled edges. Immutable after
// construction; vertices are kept sorted and edges sorted by id, so identical
// inputs always produce identical iteration order.
class graph {
public:
    graph() = default;
    graph(std::vector<std::string> vertices, std::vector<edge_record> edges);

    static graph from_json_text(const std::string& text);
    static graph load(const std::string& path);
    std::string to_json_text() const;

    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_edges() const { return edges_.size(); }
    const std::vector<std::string>& vertices() const { return vertices_; }
    const std::vector<edge_record>& edges() const { return edges_; }

    bool has_vertex(const std::string& label) const { return vindex_.count(label) > 0; }
    bool has_edge(const std::string& id) const { return eindex_.count(id) > 0; }
    int vertex_index(const std::string& label) const;  // -1 if absent
    int edge_index(const std::string& id) const;       // -1 if absent
    const edge_record& edge(const std::string& id) const;  // throws input_error

    // Edge ids incident to a vertex (loops listed once), sorted.
    const std::vector<std::string>& incident_edges(const std::string& v) const;

    bool connected() const;
    bool simple() const;  // no loops, no parallel edges

private:
    std::vector<std::string> vertices_;
    std::vector<edge_record> edges_;
    std::unordered_map<std::string, int> vindex_, eindex_;
    std::vector<std::vector<std::string>> incidence_;  // per vertex index
};

// Endpoint incidences at v; a loop contributes 2.
int degree(const graph& g, const std::string& v);

// Vertices with degree != 2, sorted.
std::vector<std::string> essential_vertices(const graph& g);

// A primitive edge together with the walk of the input graph it covers:
// walk_vertices = x_0..x_m, walk_edges = the m edge ids joining them in order.
// For a primitive loop the walk starts and ends at the same vertex.
struct primitive_edge_cover {
    std::string id;
    std::vector<std::string> walk_vertices;
    std::vector<std::string> walk_edges;
};

struct primitive_graph_result {
    graph primitive;
    std::vector<primitive_edge_cover> cover;  // one entry per primitive edge
};

// Smooths every degree-2 vertex; a cycle collapses to a single loop at its
// lexicographically least vertex. Requires a connected input.
primitive_graph_result primitive_graph(const graph& g);

struct subdiv_violation {
    std::string kind;                  // "path" or "cycle"
    std::vector<std::string> witness;  // vertex sequence
    int touched = 0;
    int required = 0;
};

struct subdiv_report {
    bool ok = false;
    std::vector<subdiv_violation> violations;
};

// (k,n)-sufficiency: every simple path between distinct essential vertices
// touches >= n-k+2 vertices and every simple cycle touches >= n-k+3 (a loop
// touches 1, a parallel pair 2). Violations carry a shortest witness.
subdiv_report check_sufficiently_subdivided(const graph& g, int k, int n);

// FNV-1a over the canonical serialization, as a hex string.
std::string graph_hash(const graph& g);

} // namespace nkconf

#endif
