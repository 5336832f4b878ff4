#include "nkconf/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace nkconf {

graph::graph(std::vector<std::string> vertices, std::vector<edge_record> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    std::sort(vertices_.begin(), vertices_.end());
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i)
        if (vertices_[i] == vertices_[i + 1])
            throw input_error("duplicate vertex label: " + vertices_[i]);
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (vertices_[i].empty()) throw input_error("empty vertex label");
        if (vertices_[i].find_first_of("|\n") != std::string::npos)
            throw input_error("label may not contain '|' or newline: " + vertices_[i]);
        vindex_[vertices_[i]] = static_cast<int>(i);
    }
    for (auto& e : edges_) {
        if (e.id.empty()) throw input_error("empty edge id");
        if (e.id.find_first_of("|\n") != std::string::npos)
            throw input_error("label may not contain '|' or newline: " + e.id);
        if (e.u > e.v) std::swap(e.u, e.v);
        if (!has_vertex(e.u) || !has_vertex(e.v))
            throw input_error("edge " + e.id + " has undeclared endpoint");
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const edge_record& a, const edge_record& b) { return a.id < b.id; });
    for (std::size_t i = 0; i + 1 < edges_.size(); ++i)
        if (edges_[i].id == edges_[i + 1].id)
            throw input_error("duplicate edge id: " + edges_[i].id);
    incidence_.resize(vertices_.size());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        eindex_[edges_[i].id] = static_cast<int>(i);
        incidence_[vindex_[edges_[i].u]].push_back(edges_[i].id);
        if (!edges_[i].is_loop()) incidence_[vindex_[edges_[i].v]].push_back(edges_[i].id);
    }
}

graph graph::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("bad JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("vertices") || !j.contains("edges"))
        throw input_error("graph JSON must contain \"vertices\" and \"edges\"");
    std::vector<std::string> verts;
    std::vector<edge_record> edges;
    try {
        for (const auto& v : j.at("vertices")) verts.push_back(v.get<std::string>());
        for (const auto& e : j.at("edges")) {
            const auto& ends = e.at("ends");
            if (!ends.is_array() || ends.size() != 2)
                throw input_error("edge \"ends\" must list exactly two vertices");
            edges.push_back({e.at("id").get<std::string>(),
                             ends[0].get<std::string>(),
                             ends[1].get<std::string>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw input_error(std::string("bad graph JSON: ") + e.what());
    }
    return graph(std::move(verts), std::move(edges));
}

graph graph::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

std::string graph::to_json_text() const {
    nlohmann::json j;
    j["vertices"] = vertices_;
    j["edges"] = nlohmann::json::array();
    for (const auto& e : edges_)
        j["edges"].push_back({{"id", e.id}, {"ends", {e.u, e.v}}});
    return j.dump();
}

int graph::vertex_index(const std::string& label) const {
    auto it = vindex_.find(label);
    return it == vindex_.end() ? -1 : it->second;
}

int graph::edge_index(const std::string& id) const {
    auto it = eindex_.find(id);
    return it == eindex_.end() ? -1 : it->second;
}

const edge_record& graph::edge(const std::string& id) const {
    int i = edge_index(id);
    if (i < 0) throw input_error("unknown edge: " + id);
    return edges_[static_cast<std::size_t>(i)];
}

const std::vector<std::string>& graph::incident_edges(const std::string& v) const {
    int i = vertex_index(v);
    if (i < 0) throw input_error("unknown vertex: " + v);
    return incidence_[static_cast<std::size_t>(i)];
}

bool graph::connected() const {
    if (vertices_.empty()) return false;
    std::vector<char> seen(vertices_.size(), 0);
    std::deque<int> queue{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!queue.empty()) {
        int at = queue.front();
        queue.pop_front();
        for (const auto& eid : incidence_[static_cast<std::size_t>(at)]) {
            const edge_record& e = edges_[static_cast<std::size_t>(eindex_.at(eid))];
            for (const std::string* end : {&e.u, &e.v}) {
                int other = vindex_.at(*end);
                if (!seen[static_cast<std::size_t>(other)]) {
                    seen[static_cast<std::size_t>(other)] = 1;
                    ++reached;
                    queue.push_back(other);
                }
            }
        }
    }
    return reached == vertices_.size();
}

bool graph::simple() const {
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& e : edges_) {
        if (e.is_loop()) return false;
        if (!pairs.insert({e.u, e.v}).second) return false;
    }
    return true;
}

int degree(const graph& g, const std::string& v) {
    if (!g.has_vertex(v)) throw input_error("unknown vertex: " + v);
    int d = 0;
    for (const auto& e : g.edges()) d += (e.u == v) + (e.v == v);
    return d;
}

std::vector<std::string> essential_vertices(const graph& g) {
    std::vector<std::string> out;
    for (const auto& v : g.vertices())
        if (degree(g, v) != 2) out.push_back(v);
    return out;
}

namespace {

bool is_cycle_graph(const graph& g) {
    if (!g.connected() || g.num_edges() != g.num_vertices()) return false;
    for (const auto& v : g.vertices())
        if (degree(g, v) != 2) return false;
    return true;
}

// Walks from `start` along `first_edge`, continuing through degree-2 vertices,
// until an essential vertex is reached. Assumes no isolated degree-2 cycle.
primitive_edge_cover walk_chain(const graph& g, const std::string& start,
                                const std::string& first_edge,
                                const std::vector<char>& is_essential) {
    primitive_edge_cover cov;
    cov.walk_vertices.push_back(start);
    std::string at = start, via = first_edge;
    for (;;) {
        const edge_record& e = g.edge(via);
        cov.walk_edges.push_back(via);
        std::string next = (e.u == at && !e.is_loop()) ? e.v : e.u;
        cov.walk_vertices.push_back(next);
        if (is_essential[static_cast<std::size_t>(g.vertex_index(next))]) return cov;
        // interior vertex: continue along the other incident edge
        const auto& inc = g.incident_edges(next);
        via = (inc[0] == via) ? inc[1] : inc[0];
        at = next;
    }
}

} // namespace

primitive_graph_result primitive_graph(const graph& g) {
    if (!g.connected()) throw input_error("primitive_graph requires a connected graph");

    primitive_graph_result result;
    if (is_cycle_graph(g)) {
        const std::string u = g.vertices().front();  // least label survives
        primitive_edge_cover cov;
        cov.id = "p0";
        cov.walk_vertices.push_back(u);
        std::string at = u, via = g.incident_edges(u).front();
        for (;;) {
            const edge_record& e = g.edge(via);
            cov.walk_edges.push_back(via);
            std::string next = (e.u == at && !e.is_loop()) ? e.v : e.u;
            cov.walk_vertices.push_back(next);
            if (next == u) break;
            const auto& inc = g.incident_edges(next);
            via = (inc[0] == via) ? inc[1] : inc[0];
            at = next;
        }
        result.primitive = graph({u}, {{"p0", u, u}});
        result.cover.push_back(std::move(cov));
        return result;
    }

    std::vector<char> is_essential(g.num_vertices(), 0);
    std::vector<std::string> prim_vertices;
    for (const auto& v : g.vertices())
        if (degree(g, v) != 2) {
            is_essential[static_cast<std::size_t>(g.vertex_index(v))] = 1;
            prim_vertices.push_back(v);
        }

    std::set<std::string> used;
    std::vector<edge_record> prim_edges;
    for (const auto& v : prim_vertices) {
        for (const auto& eid : g.incident_edges(v)) {
            if (used.count(eid)) continue;
            primitive_edge_cover cov = walk_chain(g, v, eid, is_essential);
            for (const auto& we : cov.walk_edges) used.insert(we);
            cov.id = "p" + std::to_string(prim_edges.size());
            prim_edges.push_back({cov.id, cov.walk_vertices.front(), cov.walk_vertices.back()});
            result.cover.push_back(std::move(cov));
        }
    }
    result.primitive = graph(prim_vertices, std::move(prim_edges));
    return result;
}

namespace {

// BFS distances (in edges) from src, with parent pointers for witnesses.
void bfs(const graph& g, int src, std::vector<int>& dist, std::vector<int>& parent,
         int skip_edge = -1) {
    dist.assign(g.num_vertices(), -1);
    parent.assign(g.num_vertices(), -1);
    std::deque<int> queue{src};
    dist[static_cast<std::size_t>(src)] = 0;
    while (!queue.empty()) {
        int at = queue.front();
        queue.pop_front();
        for (const auto& eid : g.incident_edges(g.vertices()[static_cast<std::size_t>(at)])) {
            int ei = g.edge_index(eid);
            if (ei == skip_edge) continue;
            const edge_record& e = g.edges()[static_cast<std::size_t>(ei)];
            for (const std::string* end : {&e.u, &e.v}) {
                int other = g.vertex_index(*end);
                if (dist[static_cast<std::size_t>(other)] < 0) {
                    dist[static_cast<std::size_t>(other)] = dist[static_cast<std::size_t>(at)] + 1;
                    parent[static_cast<std::size_t>(other)] = at;
                    queue.push_back(other);
                }
            }
        }
    }
}

std::vector<std::string> unwind_path(const graph& g, const std::vector<int>& parent, int from,
                                     int to) {
    std::vector<std::string> path;
    for (int at = to; at != -1; at = parent[static_cast<std::size_t>(at)]) {
        path.push_back(g.vertices()[static_cast<std::size_t>(at)]);
        if (at == from) break;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

} // namespace

subdiv_report check_sufficiently_subdivided(const graph& g, int k, int n) {
    if (k < 2 || k > n) throw input_error("need 2 <= k <= n");
    if (!g.connected()) throw input_error("sufficiency check requires a connected graph");

    const int need_path = n - k + 2;
    const int need_cycle = n - k + 3;
    subdiv_report report;

    // (S.1): shortest path between each pair of distinct essential vertices.
    std::vector<std::string> ess = essential_vertices(g);
    std::vector<int> dist, parent;
    for (const auto& u : ess) {
        bfs(g, g.vertex_index(u), dist, parent);
        for (const auto& v : ess) {
            if (v <= u) continue;
            int d = dist[static_cast<std::size_t>(g.vertex_index(v))];
            if (d + 1 < need_path)
                report.violations.push_back({"path",
                                             unwind_path(g, parent, g.vertex_index(u),
                                                         g.vertex_index(v)),
                                             d + 1, need_path});
        }
    }

    // (S.2): loops, then the shortest cycle through each non-loop edge,
    // deduplicated by edge set.
    std::set<std::set<std::string>> seen_cycles;
    for (const auto& e : g.edges()) {
        if (!e.is_loop()) continue;
        if (1 < need_cycle && seen_cycles.insert({e.id}).second)
            report.violations.push_back({"cycle", {e.u}, 1, need_cycle});
    }
    for (const auto& e : g.edges()) {
        if (e.is_loop()) continue;
        bfs(g, g.vertex_index(e.u), dist, parent, g.edge_index(e.id));
        int d = dist[static_cast<std::size_t>(g.vertex_index(e.v))];
        if (d < 0) continue;  // e is a bridge
        if (d + 1 >= need_cycle) continue;
        std::vector<std::string> cyc =
            unwind_path(g, parent, g.vertex_index(e.u), g.vertex_index(e.v));
        std::set<std::string> key{e.id};
        for (std::size_t i = 0; i + 1 < cyc.size(); ++i) {
            // recover the traversed edge between consecutive witness vertices
            int best = -1;
            for (const auto& eid : g.incident_edges(cyc[i])) {
                const edge_record& f = g.edge(eid);
                if (g.edge_index(eid) == g.edge_index(e.id)) continue;
                if ((f.u == cyc[i] && f.v == cyc[i + 1]) || (f.v == cyc[i] && f.u == cyc[i + 1])) {
                    best = g.edge_index(eid);
                    break;
                }
            }
            if (best >= 0) key.insert(g.edges()[static_cast<std::size_t>(best)].id);
        }
        if (seen_cycles.insert(key).second)
            report.violations.push_back({"cycle", cyc, static_cast<int>(cyc.size()), need_cycle});
    }

    report.ok = report.violations.empty();
    return report;
}

std::string graph_hash(const graph& g) {
    std::string canon;
    for (const auto& v : g.vertices()) canon += "v:" + v + ";";
    for (const auto& e : g.edges()) canon += "e:" + e.id + "[" + e.u + "," + e.v + "];";
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

} // namespace nkconf
