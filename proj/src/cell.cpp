#include "nkconf/cell.hpp"

#include <algorithm>

namespace nkconf {

std::string cell_key(const cell& x) {
    std::string out;
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (t) out += '|';
        out += x[t].is_edge ? "e:" : "v:";
        out += x[t].label;
    }
    return out;
}

cell parse_cell(const std::string& text) {
    cell x;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t bar = text.find('|', pos);
        std::string tok = text.substr(pos, bar == std::string::npos ? bar : bar - pos);
        if (tok.size() < 3 || tok[1] != ':' || (tok[0] != 'v' && tok[0] != 'e'))
            throw input_error("bad cell coordinate: \"" + tok + "\"");
        x.push_back({tok[0] == 'e', tok.substr(2)});
        if (bar == std::string::npos) break;
        pos = bar + 1;
    }
    if (x.empty()) throw input_error("empty cell");
    return x;
}

void require_cell_over(const graph& g, const cell& x) {
    for (const auto& c : x) {
        if (c.is_edge ? !g.has_edge(c.label) : !g.has_vertex(c.label))
            throw input_error("coordinate " + std::string(c.is_edge ? "e:" : "v:") + c.label +
                              " is not in the graph");
    }
}

int eta(const graph& g, const cell& x, const coord& item, eta_mode mode) {
    if (item.is_edge ? !g.has_edge(item.label) : !g.has_vertex(item.label))
        throw input_error("unknown label: " + item.label);
    require_cell_over(g, x);
    if (mode == eta_mode::at) {
        int count = 0;
        for (const auto& c : x) count += (c == item);
        return count;
    }
    if (item.is_edge) throw input_error("closure mode needs a vertex item");
    int count = 0;
    for (const auto& c : x) {
        if (!c.is_edge) {
            count += (c.label == item.label);
        } else {
            const edge_record& e = g.edge(c.label);
            count += (e.u == item.label || e.v == item.label);
        }
    }
    return count;
}

bool is_dconf_cell(const graph& g, int k, const cell& x) {
    // touched[j] = eta(vertex j, closure of x); prune-free full count
    std::vector<int> touched;
    std::vector<int> hit;  // vertex indices touched so far, deduplicated lazily
    hit.reserve(2 * x.size());
    for (const auto& c : x) {
        if (!c.is_edge) {
            hit.push_back(g.vertex_index(c.label));
        } else {
            const edge_record& e = g.edge(c.label);
            hit.push_back(g.vertex_index(e.u));
            if (!e.is_loop()) hit.push_back(g.vertex_index(e.v));
        }
    }
    std::sort(hit.begin(), hit.end());
    int run = 0;
    for (std::size_t i = 0; i < hit.size(); ++i) {
        run = (i > 0 && hit[i] == hit[i - 1]) ? run + 1 : 1;
        if (run > k - 1) return false;
    }
    return true;
}

std::vector<std::pair<int, cell>> codim1_faces(const graph& g, const cell& x) {
    if (dimension(x) == 0) throw input_error("zero-dimensional cell has no faces");
    std::vector<std::pair<int, cell>> faces;
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (!x[t].is_edge) continue;
        const edge_record& e = g.edge(x[t].label);
        cell f = x;
        f[t] = vtx(e.u);
        faces.emplace_back(static_cast<int>(t), f);
        if (!e.is_loop()) {
            f[t] = vtx(e.v);
            faces.emplace_back(static_cast<int>(t), std::move(f));
        }
    }
    return faces;
}

int ext_count(const graph& g, const cell& x, const std::string& v,
              const std::set<std::string>& excluded_edges) {
    int count = 0;
    for (const auto& c : x) {
        if (!c.is_edge || excluded_edges.count(c.label)) continue;
        const edge_record& e = g.edge(c.label);
        count += (e.u == v || e.v == v);
    }
    return count;
}

} // namespace nkconf
