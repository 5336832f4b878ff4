#include "nkconf/subdivision.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

namespace nkconf {

std::set<std::string> subdivision_context::h_edge_ids() const {
    std::set<std::string> ids;
    for (const auto& e : edges) ids.insert(e.id);
    return ids;
}

std::string subdivision_context::to_json_text() const {
    nlohmann::json j;
    j["w"] = w;
    j["a"] = a;
    j["case"] = (hcase == h_case::path ? "A" : "B");
    j["labels"] = labels;
    j["edges"] = nlohmann::json::array();
    for (const auto& e : edges)
        j["edges"].push_back({{"id", e.id}, {"source", e.source}, {"target", e.target}});
    j["i"] = i;
    j["l"] = l;
    j["ell"] = ell;
    return j.dump();
}

graph subdivide_edge(const graph& g, const std::string& edge_id, const std::string& w) {
    const edge_record& a = g.edge(edge_id);  // throws on stale label
    if (g.has_vertex(w)) throw input_error("subdivision vertex already present: " + w);
    const std::string id1 = edge_id + ":1", id2 = edge_id + ":2";
    if (g.has_edge(id1) || g.has_edge(id2))
        throw input_error("fresh edge id collides with an existing edge of " + edge_id);

    std::vector<std::string> verts = g.vertices();
    verts.push_back(w);
    std::vector<edge_record> edges;
    for (const auto& e : g.edges())
        if (e.id != edge_id) edges.push_back(e);
    edges.push_back({id1, w, a.u});
    edges.push_back({id2, w, a.v});
    return graph(std::move(verts), std::move(edges));
}

namespace {

std::string other_end(const edge_record& e, const std::string& at) {
    return (e.u == at && !e.is_loop()) ? e.v : e.u;
}

} // namespace

subdivision_context locate_h(const graph& g, const graph& g_sub, const std::string& w) {
    if (!g_sub.has_vertex(w) || g.has_vertex(w))
        throw input_error(w + " is not a subdivision vertex of the graph");
    if (g_sub.num_vertices() != g.num_vertices() + 1 || g_sub.num_edges() != g.num_edges() + 1)
        throw input_error("graphs do not differ by a single subdivision");

    // the two fresh edges are exactly the ones at w
    const auto& at_w = g_sub.incident_edges(w);
    std::vector<std::string> fresh(at_w.begin(), at_w.end());
    if (fresh.size() != 2 || degree(g_sub, w) != 2)
        throw input_error(w + " does not have degree 2 in the subdivided graph");
    for (const auto& e : g_sub.edges())
        if (e.id != fresh[0] && e.id != fresh[1]) {
            if (!g.has_edge(e.id)) throw input_error("unexpected edge " + e.id);
            const edge_record& orig = g.edge(e.id);
            if (orig.u != e.u || orig.v != e.v)
                throw input_error("edge " + e.id + " changed endpoints");
        }

    // the replaced edge is the one id of g missing from g_sub
    std::string a_id;
    for (const auto& e : g.edges())
        if (!g_sub.has_edge(e.id)) {
            if (!a_id.empty()) throw input_error("more than one edge was replaced");
            a_id = e.id;
        }
    if (a_id.empty()) throw input_error("no replaced edge found");
    const edge_record& a = g.edge(a_id);
    {
        std::multiset<std::string> got{other_end(g_sub.edge(fresh[0]), w),
                                       other_end(g_sub.edge(fresh[1]), w)};
        std::multiset<std::string> want{a.u, a.v};
        if (got != want) throw input_error("fresh edges do not span the replaced edge");
    }

    // primitive edge of g carrying a
    primitive_graph_result prim = primitive_graph(g);
    const primitive_edge_cover* cover = nullptr;
    int r = 0;  // a = f_r in the walk, 1-based
    for (const auto& cov : prim.cover)
        for (std::size_t idx = 0; idx < cov.walk_edges.size(); ++idx)
            if (cov.walk_edges[idx] == a_id) {
                cover = &cov;
                r = static_cast<int>(idx) + 1;
            }
    if (!cover) throw verification_error("replaced edge missing from the primitive cover");

    const auto& xs = cover->walk_vertices;  // x_0..x_m
    const auto& fs = cover->walk_edges;     // f_1..f_m
    const int m = static_cast<int>(fs.size());

    subdivision_context ctx;
    ctx.base = g;
    ctx.subdivided = g_sub;
    ctx.w = w;
    ctx.a = a_id;
    ctx.hcase = (xs.front() == xs.back()) ? h_case::cycle : h_case::path;
    ctx.l = m + 1;

    auto x = [&](int idx) { return xs[static_cast<std::size_t>(idx)]; };
    auto f = [&](int idx) { return fs[static_cast<std::size_t>(idx - 1)]; };

    // v_1 = the endpoint of a with the smaller label
    ctx.labels.assign(static_cast<std::size_t>(ctx.l), {});
    std::vector<std::string> edge_of(static_cast<std::size_t>(ctx.l) + 1);  // e_s ids, 1-based
    if (x(r - 1) <= x(r)) {
        ctx.i = r;
        for (int s = 1; s <= ctx.i; ++s) ctx.labels[static_cast<std::size_t>(s - 1)] = x(r - s);
        for (int s = ctx.i + 1; s <= ctx.l; ++s)
            ctx.labels[static_cast<std::size_t>(s - 1)] = x(s - 1);
        for (int s = 2; s <= ctx.i; ++s) edge_of[static_cast<std::size_t>(s)] = f(r - s + 1);
        for (int s = ctx.i + 2; s <= ctx.l; ++s) edge_of[static_cast<std::size_t>(s)] = f(s - 1);
    } else {
        ctx.i = m - r + 1;
        for (int s = 1; s <= ctx.i; ++s) ctx.labels[static_cast<std::size_t>(s - 1)] = x(r + s - 1);
        for (int s = ctx.i + 1; s <= ctx.l; ++s)
            ctx.labels[static_cast<std::size_t>(s - 1)] = x(r - s + ctx.i);
        for (int s = 2; s <= ctx.i; ++s) edge_of[static_cast<std::size_t>(s)] = f(r + s - 1);
        for (int s = ctx.i + 2; s <= ctx.l; ++s)
            edge_of[static_cast<std::size_t>(s)] = f(r - s + ctx.i + 1);
    }

    // e_1 and e_{i+1} are the fresh edges toward v_1 and v_{i+1}
    std::string e1_id, ei1_id;
    {
        const std::string end0 = other_end(g_sub.edge(fresh[0]), w);
        const std::string end1 = other_end(g_sub.edge(fresh[1]), w);
        if (end0 == end1) {  // a was a loop; break the tie by id
            e1_id = std::min(fresh[0], fresh[1]);
            ei1_id = std::max(fresh[0], fresh[1]);
        } else if (end0 == ctx.v1()) {
            e1_id = fresh[0];
            ei1_id = fresh[1];
        } else {
            e1_id = fresh[1];
            ei1_id = fresh[0];
        }
    }

    ctx.edges.assign(static_cast<std::size_t>(ctx.l), {});
    for (int s = 1; s <= ctx.l; ++s) {
        oriented_edge& oe = ctx.edges[static_cast<std::size_t>(s - 1)];
        if (s == 1) {
            oe = {e1_id, w, ctx.v1()};
        } else if (s == ctx.i + 1) {
            oe = {ei1_id, w, ctx.vi1()};
        } else {
            oe = {edge_of[static_cast<std::size_t>(s)], ctx.v(s - 1), ctx.v(s)};
        }
    }
    ctx.ell = (ctx.hcase == h_case::path) ? ctx.l : ctx.l - 1;

    // labeled structure sanity
    if (ctx.i < 1 || ctx.i > ctx.l - 1)
        throw verification_error("insertion index out of range");
    if (ctx.hcase == h_case::cycle && ctx.v(ctx.i) != ctx.v(ctx.l))
        throw verification_error("cycle labeling must close up at the primitive vertex");
    if (ctx.hcase == h_case::path && ctx.v(ctx.i) == ctx.v(ctx.l))
        throw verification_error("path labeling must have distinct primitive ends");
    return ctx;
}

std::vector<cell> deflate(const cell& x, const subdivision_context& ctx, int k) {
    require_cell_over(ctx.base, x);
    if (!is_dconf_cell(ctx.base, k, x))
        throw input_error("deflation input must satisfy the collision bound; got " + cell_key(x));

    const coord a_coord = edg(ctx.a);
    std::vector<coord> options = {vtx(ctx.v1()), vtx(ctx.w), vtx(ctx.vi1()),
                                  edg(ctx.e(1).id), edg(ctx.e(ctx.i + 1).id)};
    std::vector<cell> out{cell{}};
    out.front().reserve(x.size());
    for (const auto& c : x) {
        if (c != a_coord) {
            for (auto& partial : out) partial.push_back(c);
            continue;
        }
        std::vector<cell> next;
        next.reserve(out.size() * options.size());
        for (const auto& partial : out)
            for (const auto& opt : options) {
                next.push_back(partial);
                next.back().push_back(opt);
            }
        out = std::move(next);
    }
    std::sort(out.begin(), out.end(),
              [](const cell& p, const cell& q) { return cell_key(p) < cell_key(q); });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

cell inflate(const cell& xp, const subdivision_context& ctx) {
    require_cell_over(ctx.subdivided, xp);
    const coord w_coord = vtx(ctx.w);
    const coord e1 = edg(ctx.e(1).id), ei1 = edg(ctx.e(ctx.i + 1).id);
    cell out = xp;
    for (auto& c : out)
        if (c == w_coord || c == e1 || c == ei1) c = edg(ctx.a);
    return out;
}

complex_view build_y(const subdivision_context& ctx, int k, int n, std::size_t cell_budget) {
    return build_y(ctx, enumerate_dconf(ctx.base, k, n, cell_budget));
}

complex_view build_y(const subdivision_context& ctx, const complex_view& base_cv) {
    std::vector<cell> cells;
    for (int d = 0; d <= base_cv.max_dim(); ++d)
        for (const auto& x : base_cv.cells(d))
            for (auto& xp : deflate(x, ctx, base_cv.k())) cells.push_back(std::move(xp));
    return complex_view::from_cells(ctx.subdivided, base_cv.k(), base_cv.n(), std::move(cells));
}

bool is_external(const cell& xp, const subdivision_context& ctx, int k) {
    require_cell_over(ctx.subdivided, xp);
    if (!is_dconf_cell(ctx.subdivided, k, xp))
        throw input_error("externality is defined on cells satisfying the collision bound");

    const bool by_inflation = !is_dconf_cell(ctx.base, k, inflate(xp, ctx));

    const graph& gs = ctx.subdivided;
    int eta_w = eta(gs, xp, vtx(ctx.w), eta_mode::closure);
    bool by_counts = false;
    for (int s : {1, ctx.i + 1}) {
        int lhs = eta_w + eta(gs, xp, vtx(ctx.v(s)), eta_mode::closure) -
                  eta(gs, xp, edg(ctx.e(s).id), eta_mode::at);
        if (lhs >= k) by_counts = true;
    }
    if (by_inflation != by_counts)
        throw verification_error("externality tests disagree", cell_key(xp));
    return by_inflation;
}

graph barycentric_subdivision(const graph& g) {
    std::vector<std::string> snapshot;
    for (const auto& e : g.edges()) snapshot.push_back(e.id);
    graph out = g;
    for (const auto& id : snapshot) out = subdivide_edge(out, id, "m:" + id);
    return out;
}

} // namespace nkconf
