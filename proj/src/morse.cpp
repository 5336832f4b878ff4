#include "nkconf/morse.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <optional>
#include <ostream>

#include <json.hpp>

#include "nkconf/homology.hpp"
#include "nkconf/parallel.hpp"

namespace nkconf {

// ---------------------------------------------------------------------------
// label-based single-cell operations

bool has_property_r(const cell& xp, const subdivision_context& ctx, int s) {
    if (s < 1 || s > ctx.l) throw input_error("R(s) index out of range: " + std::to_string(s));
    const graph& gs = ctx.subdivided;
    return eta(gs, xp, vtx(ctx.v(s)), eta_mode::closure) ==
           eta(gs, xp, edg(ctx.e(s).id), eta_mode::at);
}

rank_info rank_of(const cell& xp, const subdivision_context& ctx, int k) {
    if (!is_external(xp, ctx, k))
        throw input_error("rank is defined for external cells only; got " + cell_key(xp));
    rank_info info;
    info.rank = 0;
    for (int s = 1; s <= ctx.l; ++s)
        if (has_property_r(xp, ctx, s)) {
            info.rank = s;
            break;
        }
    if (info.rank == 0 || info.rank > ctx.ell)
        throw verification_error(
            "no rank within the bound: the base graph cannot be sufficiently subdivided",
            cell_key(xp));
    if (ctx.hcase == h_case::cycle && ctx.i == ctx.l - 1 && info.rank > ctx.l - 2)
        throw verification_error("rank exceeds l-2 in the cycle case with i = l-1",
                                 cell_key(xp));
    const std::string& iota = ctx.e(info.rank).source;
    const std::string& edge_id = ctx.e(info.rank).id;
    for (int t = static_cast<int>(xp.size()); t >= 1; --t) {
        const coord& c = xp[static_cast<std::size_t>(t - 1)];
        if ((!c.is_edge && c.label == iota) || (c.is_edge && c.label == edge_id)) {
            info.t = t;
            info.role = c.is_edge ? cell_role::collapsible : cell_role::redundant;
            return info;
        }
    }
    throw verification_error("no coordinate carries iota(e_j) or e_j", cell_key(xp));
}

cell partner(const cell& xp, const subdivision_context& ctx, int k) {
    rank_info info = rank_of(xp, ctx, k);
    cell out = xp;
    coord& c = out[static_cast<std::size_t>(info.t - 1)];
    c = (info.role == cell_role::collapsible) ? vtx(ctx.e(info.rank).source)
                                              : edg(ctx.e(info.rank).id);
    return out;
}

// ---------------------------------------------------------------------------
// resolved engine shared by the batch operations

namespace {

struct engine {
    const complex_view& cv;
    const subdivision_context& ctx;
    int k, n;
    item_id nv;                                      // vertex/edge item threshold
    std::vector<std::pair<item_id, item_id>> ends;   // per subdivided edge index
    std::vector<item_id> vit, eit, iot;              // v_s, e_s, iota(e_s); 1-based
    std::vector<char> h_edge;                        // per edge index: lies on H'?
    std::vector<int> e_index_of;                     // per edge index: s with e_s, else 0
    item_id wit;
    // base-graph image used by the inflation route
    int base_nv;
    std::vector<int> subv_to_base;                   // -1 for w
    std::vector<std::pair<int, int>> inflated_ends;  // per subdivided edge index
    std::pair<int, int> a_base_ends;

    engine(const complex_view& cv_, const subdivision_context& ctx_)
        : cv(cv_), ctx(ctx_), k(cv_.k()), n(cv_.n()) {
        const graph& gs = ctx.subdivided;
        if (graph_hash(cv.underlying()) != graph_hash(gs))
            throw input_error("complex and context disagree on the subdivided graph");
        if (n > 63) throw input_error("matching machinery supports n <= 63");
        nv = static_cast<item_id>(gs.num_vertices());
        ends.reserve(gs.num_edges());
        for (const auto& e : gs.edges())
            ends.emplace_back(gs.vertex_index(e.u), gs.vertex_index(e.v));
        vit.assign(static_cast<std::size_t>(ctx.l) + 1, -1);
        eit.assign(static_cast<std::size_t>(ctx.l) + 1, -1);
        iot.assign(static_cast<std::size_t>(ctx.l) + 1, -1);
        h_edge.assign(gs.num_edges(), 0);
        e_index_of.assign(gs.num_edges(), 0);
        for (int s = 1; s <= ctx.l; ++s) {
            vit[static_cast<std::size_t>(s)] = gs.vertex_index(ctx.v(s));
            int ei = gs.edge_index(ctx.e(s).id);
            eit[static_cast<std::size_t>(s)] = nv + ei;
            iot[static_cast<std::size_t>(s)] = gs.vertex_index(ctx.e(s).source);
            h_edge[static_cast<std::size_t>(ei)] = 1;
            e_index_of[static_cast<std::size_t>(ei)] = s;
        }
        wit = gs.vertex_index(ctx.w);

        const graph& gb = ctx.base;
        base_nv = static_cast<int>(gb.num_vertices());
        subv_to_base.assign(gs.num_vertices(), -1);
        for (const auto& v : gb.vertices())
            subv_to_base[static_cast<std::size_t>(gs.vertex_index(v))] = gb.vertex_index(v);
        const edge_record& a = gb.edge(ctx.a);
        a_base_ends = {gb.vertex_index(a.u), gb.vertex_index(a.v)};
        inflated_ends.reserve(gs.num_edges());
        for (const auto& e : gs.edges()) {
            if (gb.has_edge(e.id))
                inflated_ends.emplace_back(gb.vertex_index(e.u), gb.vertex_index(e.v));
            else
                inflated_ends.push_back(a_base_ends);  // fresh edge, inflates to a
        }
    }

    bool is_edge_item(item_id c) const { return c >= nv; }

    int eta_at(const resolved_cell& rx, item_id item) const {
        int count = 0;
        for (item_id c : rx) count += (c == item);
        return count;
    }

    int eta_closure(const resolved_cell& rx, item_id v) const {
        int count = 0;
        for (item_id c : rx) {
            if (c == v) {
                ++count;
            } else if (c >= nv) {
                const auto& [u, t] = ends[static_cast<std::size_t>(c - nv)];
                count += (u == v || t == v);
            }
        }
        return count;
    }

    // closure counts of the inflated cell, taken over the base graph
    bool inflation_ok(const resolved_cell& rx) const {
        std::array<int, 128> touched{};
        int len = 0;
        auto push = [&](int bv) { touched[static_cast<std::size_t>(len++)] = bv; };
        for (item_id c : rx) {
            if (c < nv) {
                if (c == wit) {
                    const auto& [u, t] = a_base_ends;  // w inflates to a
                    push(u);
                    if (t != u) push(t);
                } else {
                    push(subv_to_base[static_cast<std::size_t>(c)]);
                }
            } else {
                const auto& [u, t] = inflated_ends[static_cast<std::size_t>(c - nv)];
                push(u);
                if (t != u) push(t);
            }
        }
        for (int a = 0; a < len; ++a) {
            int reps = 0;
            for (int b = 0; b < len; ++b) reps += (touched[static_cast<std::size_t>(b)] ==
                                                   touched[static_cast<std::size_t>(a)]);
            if (reps > k - 1) return false;
        }
        return true;
    }

    bool external(const resolved_cell& rx) const {
        bool by_inflation = !inflation_ok(rx);
        int eta_w = eta_closure(rx, wit);
        bool by_counts = false;
        for (int s : {1, ctx.i + 1}) {
            int lhs = eta_w + eta_closure(rx, vit[static_cast<std::size_t>(s)]) -
                      eta_at(rx, eit[static_cast<std::size_t>(s)]);
            if (lhs >= k) by_counts = true;
        }
        if (by_inflation != by_counts)
            throw verification_error("externality tests disagree",
                                     cell_key(cv.materialize(rx)));
        return by_inflation;
    }

    rank_info rank(const resolved_cell& rx) const {
        rank_info info;
        info.rank = 0;
        for (int s = 1; s <= ctx.l; ++s) {
            if (eta_closure(rx, vit[static_cast<std::size_t>(s)]) ==
                eta_at(rx, eit[static_cast<std::size_t>(s)])) {
                info.rank = s;
                break;
            }
        }
        if (info.rank == 0 || info.rank > ctx.ell)
            throw verification_error(
                "no rank within the bound: the base graph cannot be sufficiently subdivided",
                cell_key(cv.materialize(rx)));
        if (ctx.hcase == h_case::cycle && ctx.i == ctx.l - 1 && info.rank > ctx.l - 2)
            throw verification_error("rank exceeds l-2 in the cycle case with i = l-1",
                                     cell_key(cv.materialize(rx)));
        item_id iota = iot[static_cast<std::size_t>(info.rank)];
        item_id ej = eit[static_cast<std::size_t>(info.rank)];
        for (int t = n; t >= 1; --t) {
            item_id c = rx[static_cast<std::size_t>(t - 1)];
            if (c == iota || c == ej) {
                info.t = t;
                info.role = (c == ej) ? cell_role::collapsible : cell_role::redundant;
                return info;
            }
        }
        throw verification_error("no coordinate carries iota(e_j) or e_j",
                                 cell_key(cv.materialize(rx)));
    }

    resolved_cell partner_of(const resolved_cell& rx, const rank_info& info) const {
        resolved_cell out = rx;
        item_id& c = out[static_cast<std::size_t>(info.t - 1)];
        c = (info.role == cell_role::collapsible) ? iot[static_cast<std::size_t>(info.rank)]
                                                  : eit[static_cast<std::size_t>(info.rank)];
        return out;
    }
};

} // namespace

// ---------------------------------------------------------------------------
// matching construction

matching_record build_matching(const complex_view& cv, const subdivision_context& ctx,
                               const complex_view& y) {
    subdiv_report suff = check_sufficiently_subdivided(ctx.base, cv.k(), cv.n());
    if (!suff.ok)
        throw sufficiency_error("base graph is not (" + std::to_string(cv.k()) + "," +
                                std::to_string(cv.n()) + ")-sufficiently subdivided: " +
                                std::to_string(suff.violations.size()) + " violation(s)");
    if (graph_hash(y.underlying()) != graph_hash(cv.underlying()) || y.k() != cv.k() ||
        y.n() != cv.n())
        throw input_error("Y does not live in the same complex family");

    engine eng(cv, ctx);
    const int maxd = cv.max_dim();
    matching_record m;
    m.role.resize(static_cast<std::size_t>(maxd) + 1);
    m.partner.resize(static_cast<std::size_t>(maxd) + 1);
    m.rank.resize(static_cast<std::size_t>(maxd) + 1);
    m.tval.resize(static_cast<std::size_t>(maxd) + 1);

    for (int d = 0; d <= maxd; ++d) {
        std::size_t count = cv.count(d);
        m.role[static_cast<std::size_t>(d)].assign(count, cell_role::critical);
        m.partner[static_cast<std::size_t>(d)].assign(count, -1);
        m.rank[static_cast<std::size_t>(d)].assign(count, 0);
        m.tval[static_cast<std::size_t>(d)].assign(count, 0);
        parallel_for(count, [&, d](std::size_t idx) {
            const resolved_cell& rx = cv.resolved(d, static_cast<int>(idx));
            if (!eng.external(rx)) return;
            rank_info info = eng.rank(rx);
            m.role[static_cast<std::size_t>(d)][idx] = info.role;
            m.rank[static_cast<std::size_t>(d)][idx] = info.rank;
            m.tval[static_cast<std::size_t>(d)][idx] = info.t;
            resolved_cell mate = eng.partner_of(rx, info);
            int pd = d + (info.role == cell_role::redundant ? 1 : -1);
            int pidx = cv.index_of(mate, pd);
            if (pidx < 0)
                throw verification_error("partner cell is missing from the complex",
                                         cell_key(cv.materialize(rx)));
            m.partner[static_cast<std::size_t>(d)][idx] = pidx;
        });
    }

    // cross-validate the pairing and tally
    for (int d = 0; d <= maxd; ++d) {
        for (std::size_t idx = 0; idx < cv.count(d); ++idx) {
            cell_role r = m.role[static_cast<std::size_t>(d)][idx];
            if (r == cell_role::critical) {
                ++m.num_critical;
                continue;
            }
            ++m.num_external;
            int pd = d + (r == cell_role::redundant ? 1 : -1);
            std::int32_t p = m.partner[static_cast<std::size_t>(d)][idx];
            cell_role pr = m.role[static_cast<std::size_t>(pd)][static_cast<std::size_t>(p)];
            std::int32_t back = m.partner[static_cast<std::size_t>(pd)][static_cast<std::size_t>(p)];
            bool mutual = (pr != cell_role::critical) && (pr != r) &&
                          back == static_cast<std::int32_t>(idx) &&
                          m.rank[static_cast<std::size_t>(pd)][static_cast<std::size_t>(p)] ==
                              m.rank[static_cast<std::size_t>(d)][idx] &&
                          m.tval[static_cast<std::size_t>(pd)][static_cast<std::size_t>(p)] ==
                              m.tval[static_cast<std::size_t>(d)][idx];
            if (!mutual)
                throw verification_error(
                    "pairing is not a rank- and t-preserving involution",
                    cell_key(cv.cells(d)[idx]));
            if (r == cell_role::redundant) ++m.num_pairs;
        }
    }

    // critical cells must be exactly Y
    if (m.num_critical != y.total())
        throw verification_error("critical cell count " + std::to_string(m.num_critical) +
                                 " differs from |Y| = " + std::to_string(y.total()));
    for (int d = 0; d <= maxd; ++d)
        for (std::size_t idx = 0; idx < cv.count(d); ++idx)
            if (m.role[static_cast<std::size_t>(d)][idx] == cell_role::critical &&
                y.index_of(cv.resolved(d, static_cast<int>(idx)), d) < 0)
                throw verification_error("critical cell is not a cell of Y",
                                         cell_key(cv.cells(d)[idx]));
    return m;
}

// ---------------------------------------------------------------------------
// acyclicity

namespace {

// Alternating-cycle search within one dimension pair: nodes are redundant
// d-cells, arcs follow partner-up then face-down.
acyclicity_result alternating_search(const complex_view& cv, const matching_record& m) {
    acyclicity_result res;
    res.ok = true;
    for (int d = 0; d <= cv.max_dim(); ++d) {
        const auto& roles = m.role[static_cast<std::size_t>(d)];
        std::size_t count = roles.size();
        // adjacency on demand
        auto successors = [&](std::int32_t u) {
            std::vector<std::int32_t> next;
            std::int32_t p = m.partner[static_cast<std::size_t>(d)][static_cast<std::size_t>(u)];
            if (p < 0 || d + 1 > cv.max_dim()) return next;
            for (const auto& [t, f] : cv.resolved_faces(cv.resolved(d + 1, p))) {
                (void)t;
                int j = cv.index_of(f, d);
                if (j < 0 || j == u) continue;
                if (m.role[static_cast<std::size_t>(d)][static_cast<std::size_t>(j)] ==
                    cell_role::redundant)
                    next.push_back(j);
            }
            return next;
        };
        std::vector<char> color(count, 0);  // 0 white, 1 on stack, 2 done
        for (std::size_t start = 0; start < count; ++start) {
            if (roles[start] != cell_role::redundant || color[start]) continue;
            std::vector<std::pair<std::int32_t, std::size_t>> stack;  // (node, next-child)
            std::vector<std::vector<std::int32_t>> kids;
            stack.emplace_back(static_cast<std::int32_t>(start), 0);
            kids.push_back(successors(static_cast<std::int32_t>(start)));
            color[start] = 1;
            while (!stack.empty()) {
                auto& [u, next_child] = stack.back();
                if (next_child >= kids.back().size()) {
                    color[static_cast<std::size_t>(u)] = 2;
                    stack.pop_back();
                    kids.pop_back();
                    continue;
                }
                std::int32_t vtx_next = kids.back()[next_child++];
                if (color[static_cast<std::size_t>(vtx_next)] == 1) {
                    // unwind the alternating cycle
                    res.ok = false;
                    std::size_t at = 0;
                    while (stack[at].first != vtx_next) ++at;
                    for (; at < stack.size(); ++at) {
                        std::int32_t r = stack[at].first;
                        res.cycle.push_back(cv.cells(d)[static_cast<std::size_t>(r)]);
                        std::int32_t p =
                            m.partner[static_cast<std::size_t>(d)][static_cast<std::size_t>(r)];
                        res.cycle.push_back(cv.cells(d + 1)[static_cast<std::size_t>(p)]);
                    }
                    return res;
                }
                if (color[static_cast<std::size_t>(vtx_next)] == 0) {
                    color[static_cast<std::size_t>(vtx_next)] = 1;
                    stack.emplace_back(vtx_next, 0);
                    kids.push_back(successors(vtx_next));
                }
            }
        }
    }
    return res;
}

// Kahn topological sort over the whole modified Hasse diagram.
bool toposort_check(const complex_view& cv, const matching_record& m) {
    std::vector<std::size_t> offset(static_cast<std::size_t>(cv.max_dim()) + 2, 0);
    for (int d = 0; d <= cv.max_dim(); ++d)
        offset[static_cast<std::size_t>(d) + 1] = offset[static_cast<std::size_t>(d)] + cv.count(d);
    std::size_t total = offset.back();
    std::vector<std::vector<std::int32_t>> adj(total);
    std::vector<std::int32_t> indeg(total, 0);
    auto node = [&](int d, std::int32_t i) {
        return offset[static_cast<std::size_t>(d)] + static_cast<std::size_t>(i);
    };

    for (int d = 1; d <= cv.max_dim(); ++d) {
        for (std::size_t idx = 0; idx < cv.count(d); ++idx) {
            bool collapsible =
                m.role[static_cast<std::size_t>(d)][idx] == cell_role::collapsible;
            std::int32_t mate = m.partner[static_cast<std::size_t>(d)][idx];
            bool skipped_reversed = false;
            for (const auto& [t, f] : cv.resolved_faces(cv.resolved(d, static_cast<int>(idx)))) {
                (void)t;
                int j = cv.index_of(f, d - 1);
                if (j < 0) continue;
                if (collapsible && !skipped_reversed && j == mate) {
                    skipped_reversed = true;  // this arc is reversed below
                    continue;
                }
                adj[node(d, static_cast<std::int32_t>(idx))].push_back(
                    static_cast<std::int32_t>(node(d - 1, j)));
                ++indeg[node(d - 1, j)];
            }
        }
    }
    for (int d = 0; d <= cv.max_dim(); ++d)
        for (std::size_t idx = 0; idx < cv.count(d); ++idx)
            if (m.role[static_cast<std::size_t>(d)][idx] == cell_role::redundant) {
                std::int32_t p = m.partner[static_cast<std::size_t>(d)][idx];
                if (p < 0 || d + 1 > cv.max_dim()) continue;
                adj[node(d, static_cast<std::int32_t>(idx))].push_back(
                    static_cast<std::int32_t>(node(d + 1, p)));
                ++indeg[node(d + 1, p)];
            }

    std::deque<std::size_t> queue;
    for (std::size_t u = 0; u < total; ++u)
        if (indeg[u] == 0) queue.push_back(u);
    std::size_t processed = 0;
    while (!queue.empty()) {
        std::size_t u = queue.front();
        queue.pop_front();
        ++processed;
        for (std::int32_t v : adj[u])
            if (--indeg[static_cast<std::size_t>(v)] == 0)
                queue.push_back(static_cast<std::size_t>(v));
    }
    return processed == total;
}

} // namespace

acyclicity_result verify_acyclic(const complex_view& cv, const matching_record& m) {
    acyclicity_result alt = alternating_search(cv, m);
    bool topo_ok = toposort_check(cv, m);
    if (alt.ok != topo_ok)
        throw verification_error("acyclicity checkers disagree");
    return alt;
}

bool verify_critical_subcomplex(const complex_view& cv, const matching_record& m) {
    for (int d = 1; d <= cv.max_dim(); ++d) {
        for (std::size_t idx = 0; idx < cv.count(d); ++idx) {
            if (m.role[static_cast<std::size_t>(d)][idx] != cell_role::critical) continue;
            for (const auto& [t, f] : cv.resolved_faces(cv.resolved(d, static_cast<int>(idx)))) {
                (void)t;
                int j = cv.index_of(f, d - 1);
                if (j < 0 ||
                    m.role[static_cast<std::size_t>(d - 1)][static_cast<std::size_t>(j)] !=
                        cell_role::critical)
                    return false;
            }
        }
    }
    return true;
}

coherence_result verify_pair_coherence(const complex_view& cv, const subdivision_context& ctx,
                                       const matching_record& m) {
    engine eng(cv, ctx);
    coherence_result res;
    auto fail = [&](const std::string& what, const cell& x) {
        res.ok = false;
        res.detail = what;
        res.offending = cell_key(x);
    };
    for (int d = 0; d <= cv.max_dim() && res.ok; ++d) {
        for (std::size_t idx = 0; idx < cv.count(d) && res.ok; ++idx) {
            if (m.role[static_cast<std::size_t>(d)][idx] != cell_role::redundant) continue;
            const cell& rc = cv.cells(d)[idx];
            std::int32_t p = m.partner[static_cast<std::size_t>(d)][idx];
            if (p < 0 || d + 1 > cv.max_dim() ||
                static_cast<std::size_t>(p) >= cv.count(d + 1)) {
                fail("redundant cell has no valid partner", rc);
                break;
            }
            if (m.role[static_cast<std::size_t>(d + 1)][static_cast<std::size_t>(p)] !=
                    cell_role::collapsible ||
                m.partner[static_cast<std::size_t>(d + 1)][static_cast<std::size_t>(p)] !=
                    static_cast<std::int32_t>(idx)) {
                fail("pairing is not a mutual redundant/collapsible match", rc);
                break;
            }
            const resolved_cell& rr = cv.resolved(d, static_cast<int>(idx));
            const resolved_cell& cc = cv.resolved(d + 1, p);
            int differ = -1;
            for (std::size_t t = 0; t < rr.size(); ++t) {
                if (rr[t] != cc[t]) {
                    if (differ >= 0) {
                        differ = -2;
                        break;
                    }
                    differ = static_cast<int>(t);
                }
            }
            if (differ < 0) {
                fail("paired cells must differ in exactly one coordinate", rc);
                break;
            }
            rank_info ri, ci;
            try {
                if (!eng.external(rr) || !eng.external(cc)) {
                    fail("paired cell is not external", rc);
                    break;
                }
                ri = eng.rank(rr);
                ci = eng.rank(cc);
            } catch (const verification_error& e) {
                fail(std::string("rank breakdown: ") + e.what(), rc);
                break;
            }
            if (ri.rank != ci.rank || ri.t != ci.t || ri.t != differ + 1) {
                fail("pair does not share rank and t-value", rc);
                break;
            }
            if (rr[static_cast<std::size_t>(differ)] !=
                    eng.iot[static_cast<std::size_t>(ri.rank)] ||
                cc[static_cast<std::size_t>(differ)] !=
                    eng.eit[static_cast<std::size_t>(ri.rank)]) {
                fail("pair is not an iota(e_j) <-> e_j toggle", rc);
                break;
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Morse complex over F2

std::vector<long> morse_betti(const complex_view& cv, const matching_record& m) {
    const int maxd = cv.max_dim();
    // ordinals of critical cells per dimension
    std::vector<std::vector<std::int32_t>> ordinal(static_cast<std::size_t>(maxd) + 1);
    std::vector<long> crit(static_cast<std::size_t>(maxd) + 1, 0);
    for (int d = 0; d <= maxd; ++d) {
        ordinal[static_cast<std::size_t>(d)].assign(cv.count(d), -1);
        for (std::size_t idx = 0; idx < cv.count(d); ++idx)
            if (m.role[static_cast<std::size_t>(d)][idx] == cell_role::critical)
                ordinal[static_cast<std::size_t>(d)][idx] =
                    static_cast<std::int32_t>(crit[static_cast<std::size_t>(d)]++);
    }

    auto xor_merge = [](std::vector<std::int32_t>& into, const std::vector<std::int32_t>& other) {
        std::vector<std::int32_t> merged;
        std::set_symmetric_difference(into.begin(), into.end(), other.begin(), other.end(),
                                      std::back_inserter(merged));
        into = std::move(merged);
    };

    std::vector<long> ranks(static_cast<std::size_t>(maxd) + 2, 0);
    for (int d = 1; d <= maxd; ++d) {
        // paths from (d-1)-cells down to critical (d-1)-cells, mod 2
        std::vector<std::optional<std::vector<std::int32_t>>> memo(cv.count(d - 1));
        std::vector<char> in_progress(cv.count(d - 1), 0);

        // dependencies of a (d-1)-cell: the other faces of its up-partner
        auto deps_of = [&](std::int32_t u) {
            std::vector<std::int32_t> deps;
            if (m.role[static_cast<std::size_t>(d - 1)][static_cast<std::size_t>(u)] !=
                cell_role::redundant)
                return deps;
            std::int32_t p = m.partner[static_cast<std::size_t>(d - 1)][static_cast<std::size_t>(u)];
            if (p < 0 || d > maxd) return deps;
            for (const auto& [t, f] : cv.resolved_faces(cv.resolved(d, p))) {
                (void)t;
                int j = cv.index_of(f, d - 1);
                if (j >= 0 && j != u) deps.push_back(static_cast<std::int32_t>(j));
            }
            return deps;
        };

        // memoized evaluation with an explicit stack; V-paths can be long
        auto paths = [&](std::int32_t root) -> const std::vector<std::int32_t>& {
            if (memo[static_cast<std::size_t>(root)]) return *memo[static_cast<std::size_t>(root)];
            struct frame {
                std::int32_t u;
                std::vector<std::int32_t> deps;
                std::size_t next = 0;
            };
            std::vector<frame> stack;
            stack.push_back({root, deps_of(root), 0});
            in_progress[static_cast<std::size_t>(root)] = 1;
            while (!stack.empty()) {
                frame& top = stack.back();
                if (top.next < top.deps.size()) {
                    std::int32_t dep = top.deps[top.next++];
                    if (memo[static_cast<std::size_t>(dep)]) continue;
                    if (in_progress[static_cast<std::size_t>(dep)])
                        throw verification_error(
                            "gradient paths do not terminate; matching is cyclic",
                            cell_key(cv.cells(d - 1)[static_cast<std::size_t>(dep)]));
                    in_progress[static_cast<std::size_t>(dep)] = 1;
                    stack.push_back({dep, deps_of(dep), 0});
                    continue;
                }
                std::vector<std::int32_t> acc;
                cell_role r =
                    m.role[static_cast<std::size_t>(d - 1)][static_cast<std::size_t>(top.u)];
                if (r == cell_role::critical) {
                    acc.push_back(
                        ordinal[static_cast<std::size_t>(d - 1)][static_cast<std::size_t>(top.u)]);
                } else if (r == cell_role::redundant) {
                    for (std::int32_t dep : top.deps)
                        xor_merge(acc, *memo[static_cast<std::size_t>(dep)]);
                }
                // collapsible cells absorb the path
                in_progress[static_cast<std::size_t>(top.u)] = 0;
                memo[static_cast<std::size_t>(top.u)] = std::move(acc);
                stack.pop_back();
            }
            return *memo[static_cast<std::size_t>(root)];
        };

        sparse_matrix md;
        md.rows = static_cast<int>(crit[static_cast<std::size_t>(d - 1)]);
        md.cols = static_cast<int>(crit[static_cast<std::size_t>(d)]);
        md.columns.assign(static_cast<std::size_t>(md.cols), {});
        for (std::size_t idx = 0; idx < cv.count(d); ++idx) {
            if (m.role[static_cast<std::size_t>(d)][idx] != cell_role::critical) continue;
            std::vector<std::int32_t> acc;
            for (const auto& [t, f] : cv.resolved_faces(cv.resolved(d, static_cast<int>(idx)))) {
                (void)t;
                int j = cv.index_of(f, d - 1);
                if (j < 0) continue;
                xor_merge(acc, paths(static_cast<std::int32_t>(j)));
            }
            auto& col =
                md.columns[static_cast<std::size_t>(ordinal[static_cast<std::size_t>(d)][idx])];
            for (std::int32_t r : acc) col.emplace_back(r, 1);
        }
        ranks[static_cast<std::size_t>(d)] = matrix_rank(md, coeff_field::mod2);
    }

    std::vector<long> betti(static_cast<std::size_t>(maxd) + 1, 0);
    for (int d = 0; d <= maxd; ++d)
        betti[static_cast<std::size_t>(d)] = crit[static_cast<std::size_t>(d)] -
                                             ranks[static_cast<std::size_t>(d)] -
                                             ranks[static_cast<std::size_t>(d) + 1];
    return betti;
}

// ---------------------------------------------------------------------------
// lemma oracle suite

namespace {

using mask_t = std::uint64_t;

struct mask_engine : engine {
    mask_engine(const complex_view& cv_, const subdivision_context& ctx_) : engine(cv_, ctx_) {
        if (n > 63) throw input_error("lemma verification supports n <= 63");
    }

    mask_t closure_mask(const resolved_cell& rx, item_id v) const {
        mask_t out = 0;
        for (std::size_t t = 0; t < rx.size(); ++t) {
            item_id c = rx[t];
            bool touch = (c == v);
            if (!touch && c >= nv) {
                const auto& [a, b] = ends[static_cast<std::size_t>(c - nv)];
                touch = (a == v || b == v);
            }
            if (touch) out |= (mask_t{1} << t);
        }
        return out;
    }

    mask_t at_mask(const resolved_cell& rx, item_id item) const {
        mask_t out = 0;
        for (std::size_t t = 0; t < rx.size(); ++t)
            if (rx[t] == item) out |= (mask_t{1} << t);
        return out;
    }

    // v_s(closure) minus e_s(cell), as a coordinate mask
    mask_t diff_mask(const resolved_cell& rx, int s) const {
        return closure_mask(rx, vit[static_cast<std::size_t>(s)]) &
               ~at_mask(rx, eit[static_cast<std::size_t>(s)]);
    }
};

} // namespace

std::string lemma_check_report::to_json_text() const {
    nlohmann::json j;
    j["field_nonempty"] = field_nonempty;
    j["rank_bound"] = rank_bound;
    j["cycle_case_bound"] = cycle_case_bound;
    j["face_op_stability"] = face_op_stability;
    j["field_well_defined"] = field_well_defined;
    j["downstep_classification"] = downstep_classification;
    j["const_rank"] = const_rank;
    j["const_diff"] = const_diff;
    if (!detail.empty()) j["detail"] = detail;
    return j.dump();
}

lemma_check_report check_lemmas(const complex_view& cv, const subdivision_context& ctx,
                                const matching_record& m) {
    mask_engine eng(cv, ctx);
    lemma_check_report rep;
    const int maxd = cv.max_dim();
    auto note = [&](const std::string& what, const cell& x) {
        if (rep.detail.empty()) rep.detail = what + " [cell " + cell_key(x) + "]";
    };

    auto role_at = [&](int d, int idx) { return m.role[static_cast<std::size_t>(d)][static_cast<std::size_t>(idx)]; };
    auto rank_at = [&](int d, int idx) { return m.rank[static_cast<std::size_t>(d)][static_cast<std::size_t>(idx)]; };

    // per-external-cell facts
    for (int d = 0; d <= maxd; ++d) {
        for (std::size_t idx = 0; idx < cv.count(d); ++idx) {
            if (role_at(d, static_cast<int>(idx)) == cell_role::critical) continue;
            const resolved_cell& rx = cv.resolved(d, static_cast<int>(idx));
            int j = rank_at(d, static_cast<int>(idx));
            if (j < 1 || j > ctx.ell) {
                rep.rank_bound = false;
                note("rank outside 1..ell", cv.cells(d)[idx]);
            }
            if (ctx.hcase == h_case::cycle && ctx.i == ctx.l - 1 && j > ctx.l - 2) {
                rep.cycle_case_bound = false;
                note("rank above l-2 in cycle case with i = l-1", cv.cells(d)[idx]);
            }
            if (eng.eta_at(rx, eng.iot[static_cast<std::size_t>(j)]) +
                    eng.eta_at(rx, eng.eit[static_cast<std::size_t>(j)]) <
                1) {
                rep.field_nonempty = false;
                note("no coordinate at iota(e_j) or e_j", cv.cells(d)[idx]);
            }
        }
    }

    // iota-type face pairs: closure-count stability and rank/externality transfer
    for (int d = 1; d <= maxd; ++d) {
        for (std::size_t idx = 0; idx < cv.count(d); ++idx) {
            const resolved_cell& rx = cv.resolved(d, static_cast<int>(idx));
            for (std::size_t t = 0; t < rx.size(); ++t) {
                if (!eng.is_edge_item(rx[t])) continue;
                int s_of_edge = eng.e_index_of[static_cast<std::size_t>(rx[t] - eng.nv)];
                if (s_of_edge == 0) continue;  // not an H' edge
                int j = s_of_edge;
                resolved_cell ry = rx;
                ry[t] = eng.iot[static_cast<std::size_t>(j)];
                int yidx = cv.index_of(ry, d - 1);
                if (yidx < 0) {
                    rep.face_op_stability = false;
                    note("iota-type face missing", cv.cells(d)[idx]);
                    continue;
                }
                if (eng.eta_closure(ry, eng.wit) != eng.eta_closure(rx, eng.wit)) {
                    rep.face_op_stability = false;
                    note("eta(w, closure) not stable under iota-type face", cv.cells(d)[idx]);
                }
                for (int s = 1; s <= ctx.l; ++s) {
                    bool exempt = ctx.hcase == h_case::cycle &&
                                  ((j == ctx.i && s == ctx.l) || (j == ctx.l && s == ctx.i));
                    if (exempt) continue;
                    if (eng.diff_mask(ry, s) != eng.diff_mask(rx, s)) {
                        rep.face_op_stability = false;
                        note("closure-count set moved under iota-type face at s=" +
                                 std::to_string(s),
                             cv.cells(d)[idx]);
                    }
                }
                bool x_rank_j = role_at(d, static_cast<int>(idx)) != cell_role::critical &&
                                rank_at(d, static_cast<int>(idx)) == j;
                bool y_rank_j = role_at(d - 1, yidx) != cell_role::critical &&
                                rank_at(d - 1, yidx) == j;
                if (x_rank_j != y_rank_j) {
                    rep.field_well_defined = false;
                    note("rank-j externality does not transfer along the iota-type face",
                         cv.cells(d)[idx]);
                }
            }
        }
    }

    // classification of down-steps between external cells
    for (int d = 1; d <= maxd; ++d) {
        for (std::size_t idx = 0; idx < cv.count(d); ++idx) {
            if (role_at(d, static_cast<int>(idx)) != cell_role::collapsible) continue;
            const resolved_cell& rx = cv.resolved(d, static_cast<int>(idx));
            std::int32_t mate = m.partner[static_cast<std::size_t>(d)][idx];
            int j = rank_at(d, static_cast<int>(idx));
            for (const auto& [t, f] : cv.resolved_faces(rx)) {
                int yidx = cv.index_of(f, d - 1);
                if (yidx < 0 || yidx == mate) continue;
                if (role_at(d - 1, yidx) != cell_role::redundant) continue;
                int h = j - rank_at(d - 1, yidx);
                item_id f_edge = rx[static_cast<std::size_t>(t)];
                item_id u = f[static_cast<std::size_t>(t)];
                const auto& fe = eng.ends[static_cast<std::size_t>(f_edge - eng.nv)];
                bool f_on_h = eng.h_edge[static_cast<std::size_t>(f_edge - eng.nv)] != 0;
                auto is_e = [&](int s) { return f_edge == eng.eit[static_cast<std::size_t>(s)]; };
                auto is_v = [&](item_id vv, int s) {
                    return vv == eng.vit[static_cast<std::size_t>(s)];
                };
                bool ok = false;
                if (h < 0) {
                    ok = is_e(j) && is_v(u, j);
                } else if (h == 0) {
                    if (j == 1 || j == ctx.i + 1) {
                        int jp = (j == 1) ? ctx.i + 1 : 1;
                        ok = (u == eng.wit) && is_e(jp);
                    } else {
                        ok = is_v(u, j - 1) && is_e(j - 1);
                    }
                } else if (h == 1) {
                    if (j == ctx.i + 1) {
                        bool touches_vi = (fe.first == eng.vit[static_cast<std::size_t>(ctx.i)] ||
                                           fe.second == eng.vit[static_cast<std::size_t>(ctx.i)]);
                        bool tail = !f_on_h || (is_e(ctx.l) && ctx.i < ctx.l - 2 &&
                                                ctx.hcase == h_case::cycle);
                        ok = !is_v(u, ctx.i) && touches_vi && tail;
                    } else {
                        ok = is_e(j) && is_v(u, j);
                    }
                } else {  // h >= 2
                    int q = rank_at(d - 1, yidx);
                    bool touches_vi = (fe.first == eng.vit[static_cast<std::size_t>(ctx.i)] ||
                                       fe.second == eng.vit[static_cast<std::size_t>(ctx.i)]);
                    bool d1 = (q + 1 != ctx.i + 1) && q + 1 <= j - 1 && is_e(q + 1) &&
                              is_v(u, q + 1);
                    bool d2 = !f_on_h && !is_v(u, ctx.i) && touches_vi && q == ctx.i &&
                              ctx.i <= j - 2;
                    bool d3 = ctx.hcase == h_case::cycle && is_e(ctx.l) && j + 1 < ctx.l &&
                              !is_v(u, ctx.i) && q == ctx.i && ctx.i <= j - 2;
                    ok = (d1 + d2 + d3) == 1;
                }
                if (!ok) {
                    rep.downstep_classification = false;
                    note("down-step between external cells fits no admissible case (h=" +
                             std::to_string(h) + ")",
                         cv.cells(d)[idx]);
                }
            }
        }
    }

    // rank equality for e_s-removing down-steps, s an attained rank
    {
        std::vector<char> attained(static_cast<std::size_t>(ctx.l) + 1, 0);
        for (int d = 0; d <= maxd; ++d)
            for (std::size_t idx = 0; idx < cv.count(d); ++idx)
                if (role_at(d, static_cast<int>(idx)) != cell_role::critical)
                    attained[static_cast<std::size_t>(rank_at(d, static_cast<int>(idx)))] = 1;
        for (int d = 1; d <= maxd; ++d) {
            for (std::size_t idx = 0; idx < cv.count(d); ++idx) {
                if (role_at(d, static_cast<int>(idx)) != cell_role::collapsible) continue;
                const resolved_cell& rx = cv.resolved(d, static_cast<int>(idx));
                std::int32_t mate = m.partner[static_cast<std::size_t>(d)][idx];
                for (std::size_t t = 0; t < rx.size(); ++t) {
                    if (!eng.is_edge_item(rx[t])) continue;
                    int s = eng.e_index_of[static_cast<std::size_t>(rx[t] - eng.nv)];
                    if (s == 0 || !attained[static_cast<std::size_t>(s)]) continue;
                    resolved_cell ry = rx;
                    ry[t] = eng.iot[static_cast<std::size_t>(s)];
                    int yidx = cv.index_of(ry, d - 1);
                    if (yidx < 0 || role_at(d - 1, yidx) != cell_role::redundant) continue;
                    if (rank_at(d - 1, yidx) != rank_at(d, static_cast<int>(idx))) {
                        rep.const_rank = false;
                        note("rank changes across an e_s-removing down-step",
                             cv.cells(d)[idx]);
                    }
                    if (yidx != mate) {
                        int jx = rank_at(d, static_cast<int>(idx));
                        bool set_match = (std::min(s, jx) == 1 && std::max(s, jx) == ctx.i + 1);
                        if (!set_match) {
                            rep.const_rank = false;
                            note("unmatched e_s-removal outside {1, i+1}", cv.cells(d)[idx]);
                        }
                    }
                }
            }
        }
    }

    // constancy of v_{i+1}-closure sets along alternating paths of rank <= i+1
    {
        bool attained_i1 = false;
        for (int d = 0; d <= maxd && !attained_i1; ++d)
            for (std::size_t idx = 0; idx < cv.count(d); ++idx)
                if (role_at(d, static_cast<int>(idx)) != cell_role::critical &&
                    rank_at(d, static_cast<int>(idx)) == ctx.i + 1) {
                    attained_i1 = true;
                    break;
                }
        if (!attained_i1) {
            rep.const_diff = "skipped";
        } else {
            for (int d = 0; d <= maxd; ++d) {
                for (std::size_t idx = 0; idx < cv.count(d); ++idx) {
                    if (role_at(d, static_cast<int>(idx)) != cell_role::redundant) continue;
                    if (rank_at(d, static_cast<int>(idx)) > ctx.i + 1) continue;
                    const resolved_cell& ry = cv.resolved(d, static_cast<int>(idx));
                    std::int32_t p = m.partner[static_cast<std::size_t>(d)][idx];
                    const resolved_cell& px = cv.resolved(d + 1, p);
                    mask_t sy = eng.diff_mask(ry, ctx.i + 1);
                    if (sy != eng.diff_mask(px, ctx.i + 1)) {
                        rep.const_diff = "fail";
                        note("v_{i+1} closure set moved inside a matched pair",
                             cv.cells(d)[idx]);
                    }
                    for (const auto& [t, f] : cv.resolved_faces(px)) {
                        (void)t;
                        int y2 = cv.index_of(f, d);
                        if (y2 < 0 || y2 == static_cast<int>(idx)) continue;
                        if (role_at(d, y2) != cell_role::redundant) continue;
                        if (rank_at(d, y2) > ctx.i + 1) continue;
                        if (eng.diff_mask(cv.resolved(d, y2), ctx.i + 1) != sy) {
                            rep.const_diff = "fail";
                            note("v_{i+1} closure set moved along a down-step",
                                 cv.cells(d)[idx]);
                        }
                    }
                }
            }
        }
    }
    return rep;
}

void write_matching(std::ostream& out, const complex_view& cv, const matching_record& m) {
    for (int d = 0; d <= cv.max_dim(); ++d) {
        for (std::size_t idx = 0; idx < cv.count(d); ++idx) {
            nlohmann::json j;
            j["cell"] = cell_key(cv.cells(d)[idx]);
            cell_role r = m.role[static_cast<std::size_t>(d)][idx];
            j["role"] = role_name(r);
            if (r != cell_role::critical) {
                j["rank"] = m.rank[static_cast<std::size_t>(d)][idx];
                j["t"] = m.tval[static_cast<std::size_t>(d)][idx];
                int pd = d + (r == cell_role::redundant ? 1 : -1);
                std::int32_t p = m.partner[static_cast<std::size_t>(d)][idx];
                if (p >= 0)
                    j["partner"] = cell_key(cv.cells(pd)[static_cast<std::size_t>(p)]);
            }
            out << j.dump() << "\n";
        }
    }
}

} // namespace nkconf
