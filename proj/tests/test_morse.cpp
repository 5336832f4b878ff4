#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "battery.hpp"
#include "fault.hpp"
#include "nkconf/homology.hpp"
#include "nkconf/morse.hpp"
#include "oracle.hpp"

using namespace nkconf;

namespace {

graph pqrs() {
    return graph({"p", "q", "r", "s"}, {{"pq", "p", "q"}, {"qr", "q", "r"}, {"rs", "r", "s"}});
}

struct instance {
    subdivision_context ctx;
    complex_view sub;
    complex_view y;
    matching_record m;
};

instance make_instance(const graph& g, const std::string& edge, int k, int n) {
    instance inst;
    graph gs = subdivide_edge(g, edge, "w");
    inst.ctx = locate_h(g, gs, "w");
    inst.sub = enumerate_dconf(gs, k, n);
    inst.y = build_y(inst.ctx, k, n);
    inst.m = build_matching(inst.sub, inst.ctx, inst.y);
    return inst;
}

matching_record empty_matching(const complex_view& cv) {
    matching_record m;
    int maxd = cv.max_dim();
    m.role.resize(static_cast<std::size_t>(maxd) + 1);
    m.partner.resize(static_cast<std::size_t>(maxd) + 1);
    m.rank.resize(static_cast<std::size_t>(maxd) + 1);
    m.tval.resize(static_cast<std::size_t>(maxd) + 1);
    for (int d = 0; d <= maxd; ++d) {
        m.role[static_cast<std::size_t>(d)].assign(cv.count(d), cell_role::critical);
        m.partner[static_cast<std::size_t>(d)].assign(cv.count(d), -1);
        m.rank[static_cast<std::size_t>(d)].assign(cv.count(d), 0);
        m.tval[static_cast<std::size_t>(d)].assign(cv.count(d), 0);
    }
    m.num_critical = cv.total();
    return m;
}

} // namespace

TEST_CASE("property R(s) by closure counting") {
    graph g = pqrs();
    subdivision_context ctx = locate_h(g, subdivide_edge(g, "qr", "w"), "w");
    cell wq{vtx("w"), vtx("q")};
    CHECK_FALSE(has_property_r(wq, ctx, 1));  // closure hits q without e_1
    CHECK(has_property_r(wq, ctx, 2));        // nothing near p
    cell wr{vtx("w"), vtx("r")};
    CHECK(has_property_r(wr, ctx, 1));
    cell far{vtx("p"), vtx("s")};
    CHECK(has_property_r(far, ctx, 3));  // 0 = 0 away from v_3
    CHECK_THROWS_AS(has_property_r(wq, ctx, 0), input_error);
    CHECK_THROWS_AS(has_property_r(wq, ctx, 9), input_error);
}

TEST_CASE("rank, pairing coordinate and role on the worked path instance") {
    graph g = pqrs();
    subdivision_context ctx = locate_h(g, subdivide_edge(g, "qr", "w"), "w");

    rank_info wq = rank_of({vtx("w"), vtx("q")}, ctx, 2);
    CHECK(wq.rank == 2);
    CHECK(wq.t == 2);
    CHECK(wq.role == cell_role::redundant);

    rank_info wr = rank_of({vtx("w"), vtx("r")}, ctx, 2);
    CHECK(wr.rank == 1);
    CHECK(wr.t == 1);
    CHECK(wr.role == cell_role::redundant);

    rank_info qwr = rank_of({edg("qr:1"), vtx("r")}, ctx, 2);
    CHECK(qwr.rank == 1);
    CHECK(qwr.t == 1);
    CHECK(qwr.role == cell_role::collapsible);

    CHECK(cell_key(partner({vtx("w"), vtx("q")}, ctx, 2)) == "v:w|e:pq");
    CHECK(cell_key(partner({vtx("w"), vtx("r")}, ctx, 2)) == "e:qr:1|v:r");

    // not external: rank is undefined
    CHECK_THROWS_AS(rank_of({vtx("p"), vtx("s")}, ctx, 2), input_error);
}

TEST_CASE("partner is an involution on the external cells") {
    instance inst = make_instance(pqrs(), "qr", 2, 2);
    int externals = 0;
    for (int d = 0; d <= inst.sub.max_dim(); ++d) {
        for (const auto& xp : inst.sub.cells(d)) {
            if (!is_external(xp, inst.ctx, 2)) continue;
            ++externals;
            cell mate = partner(xp, inst.ctx, 2);
            CHECK(partner(mate, inst.ctx, 2) == xp);
            rank_info a = rank_of(xp, inst.ctx, 2), b = rank_of(mate, inst.ctx, 2);
            CHECK(a.rank == b.rank);
            CHECK(a.t == b.t);
        }
    }
    CHECK(externals == 16);
}

TEST_CASE("single-cell rank agrees with the batch classification") {
    instance inst = make_instance(pqrs(), "qr", 2, 2);
    for (int d = 0; d <= inst.sub.max_dim(); ++d) {
        for (std::size_t idx = 0; idx < inst.sub.count(d); ++idx) {
            const cell& xp = inst.sub.cells(d)[idx];
            bool ext = inst.m.role[static_cast<std::size_t>(d)][idx] != cell_role::critical;
            CHECK(ext == is_external(xp, inst.ctx, 2));
            if (!ext) continue;
            rank_info info = rank_of(xp, inst.ctx, 2);
            CHECK(info.rank == inst.m.rank[static_cast<std::size_t>(d)][idx]);
            CHECK(info.t == inst.m.tval[static_cast<std::size_t>(d)][idx]);
            CHECK(info.role == inst.m.role[static_cast<std::size_t>(d)][idx]);
        }
    }
}

TEST_CASE("matching on the worked path instance: 8 pairs, 34 critical cells") {
    instance inst = make_instance(pqrs(), "qr", 2, 2);
    CHECK(inst.m.num_pairs == 8);
    CHECK(inst.m.num_external == 16);
    CHECK(inst.m.num_critical == 34);
    CHECK(verify_pair_coherence(inst.sub, inst.ctx, inst.m).ok);
    CHECK(verify_critical_subcomplex(inst.sub, inst.m));
    CHECK(verify_acyclic(inst.sub, inst.m).ok);
    CHECK(check_lemmas(inst.sub, inst.ctx, inst.m).all_ok());
}

TEST_CASE("matching on a star leaf subdivision covers every external cell") {
    instance inst = make_instance(battery::star(3), "cp", 2, 2);
    CHECK(inst.m.num_external == 2 * inst.m.num_pairs);
    CHECK(inst.m.num_critical + inst.m.num_external == inst.sub.total());
    CHECK(inst.m.num_critical == inst.y.total());
    CHECK(verify_acyclic(inst.sub, inst.m).ok);
}

TEST_CASE("matching on a cycle instance: critical set equals Y cell-for-cell") {
    instance inst = make_instance(battery::cycle(3), "ab", 2, 2);
    for (int d = 0; d <= inst.sub.max_dim(); ++d)
        for (std::size_t idx = 0; idx < inst.sub.count(d); ++idx) {
            bool critical =
                inst.m.role[static_cast<std::size_t>(d)][idx] == cell_role::critical;
            CHECK(critical == inst.y.contains(inst.sub.cells(d)[idx]));
        }
}

TEST_CASE("matching refuses an insufficiently subdivided base") {
    graph fig = battery::figure_graph();
    graph sub = subdivide_edge(fig, "ab", "w");
    subdivision_context ctx = locate_h(fig, sub, "w");
    complex_view cv = enumerate_dconf(sub, 2, 3);
    complex_view y = build_y(ctx, 2, 3);
    CHECK_THROWS_AS(build_matching(cv, ctx, y), sufficiency_error);
}

TEST_CASE("acyclicity holds on real instances and fails on a planted cycle") {
    instance inst = make_instance(pqrs(), "qr", 2, 2);
    acyclicity_result ok = verify_acyclic(inst.sub, inst.m);
    CHECK(ok.ok);
    CHECK(ok.cycle.empty());

    // planted alternating cycle on the C_4 square complex
    graph c4 = battery::cycle(4);
    complex_view cv = enumerate_dconf(c4, 2, 2);
    matching_record bad = empty_matching(cv);
    auto pair_up = [&](const cell& low, const cell& high) {
        auto [ld, li] = *cv.find(low);
        auto [hd, hi] = *cv.find(high);
        REQUIRE(ld + 1 == hd);
        bad.role[static_cast<std::size_t>(ld)][static_cast<std::size_t>(li)] =
            cell_role::redundant;
        bad.role[static_cast<std::size_t>(hd)][static_cast<std::size_t>(hi)] =
            cell_role::collapsible;
        bad.partner[static_cast<std::size_t>(ld)][static_cast<std::size_t>(li)] = hi;
        bad.partner[static_cast<std::size_t>(hd)][static_cast<std::size_t>(hi)] = li;
    };
    pair_up({vtx("a"), vtx("c")}, {edg("ab"), vtx("c")});
    pair_up({vtx("b"), vtx("c")}, {vtx("b"), edg("cd")});
    pair_up({vtx("b"), vtx("d")}, {edg("ab"), vtx("d")});
    pair_up({vtx("a"), vtx("d")}, {vtx("a"), edg("cd")});
    acyclicity_result found = verify_acyclic(cv, bad);
    CHECK_FALSE(found.ok);
    CHECK(found.cycle.size() >= 4);
    CHECK_THROWS_AS(morse_betti(cv, bad), verification_error);
}

TEST_CASE("empty matching: acyclic, full critical subcomplex, Betti unchanged") {
    complex_view cv = enumerate_dconf(battery::cycle(4), 2, 2);
    matching_record none = empty_matching(cv);
    CHECK(verify_acyclic(cv, none).ok);
    CHECK(verify_critical_subcomplex(cv, none));
    CHECK(betti_equal(morse_betti(cv, none), betti_numbers(cv, coeff_field::mod2)));
}

TEST_CASE("critical subcomplex check notices a deleted critical cell") {
    instance inst = make_instance(pqrs(), "qr", 2, 2);
    CHECK(verify_critical_subcomplex(inst.sub, inst.m));
    // knock one critical 0-cell out of the critical set
    matching_record bad = inst.m;
    bool flipped = false;
    for (std::size_t idx = 0; idx < inst.sub.count(0) && !flipped; ++idx) {
        if (bad.role[0][idx] != cell_role::critical) continue;
        // only a cell under some critical coface will do
        const auto& rx = inst.sub.resolved(0, static_cast<int>(idx));
        for (std::size_t up = 0; up < inst.sub.count(1); ++up) {
            if (bad.role[1][up] != cell_role::critical) continue;
            for (const auto& [t, f] : inst.sub.resolved_faces(inst.sub.resolved(1, static_cast<int>(up)))) {
                (void)t;
                if (f == rx) {
                    bad.role[0][idx] = cell_role::collapsible;
                    flipped = true;
                }
            }
            if (flipped) break;
        }
    }
    REQUIRE(flipped);
    CHECK_FALSE(verify_critical_subcomplex(inst.sub, bad));
}

TEST_CASE("Morse Betti equals direct Betti on the worked instances") {
    instance p = make_instance(pqrs(), "qr", 2, 2);
    std::vector<long> morse = morse_betti(p.sub, p.m);
    CHECK(betti_equal(morse, {2, 0}));
    CHECK(betti_equal(morse, betti_numbers(p.sub, coeff_field::mod2)));
    CHECK(betti_equal(morse, betti_numbers(p.y, coeff_field::mod2)));

    instance c = make_instance(battery::cycle(3), "ab", 2, 2);
    CHECK(betti_equal(morse_betti(c.sub, c.m), {1, 1}));
}

TEST_CASE("fault injection: a swapped pair is detected") {
    for (const auto& [g, edge] : std::vector<std::pair<graph, std::string>>{
             {pqrs(), "qr"}, {battery::cycle(4), "bc"}, {battery::star(3), "cp"}}) {
        instance inst = make_instance(g, edge, 2, 2);
        auto bad = fault::corrupt(inst.sub, inst.m);
        REQUIRE(bad.has_value());
        fault::detection det = fault::detect(inst.sub, inst.ctx, *bad);
        CHECK(det.any());
    }
}

TEST_CASE("cycle case with i = l-1: ranks stay below l-2") {
    // lollipop: triangle z-a-b with a pendant y at z; the primitive vertex z
    // is not the least label on its cycle, which pushes the insertion index
    // to l-1 when the z-a edge is split
    graph lolli({"a", "b", "y", "z"},
                {{"ab", "a", "b"}, {"az", "a", "z"}, {"bz", "b", "z"}, {"yz", "y", "z"}});
    instance inst = make_instance(lolli, "az", 2, 2);
    REQUIRE(inst.ctx.hcase == h_case::cycle);
    REQUIRE(inst.ctx.i == inst.ctx.l - 1);
    CHECK(inst.ctx.l == 4);
    int externals = 0;
    for (int d = 0; d <= inst.sub.max_dim(); ++d)
        for (std::size_t idx = 0; idx < inst.sub.count(d); ++idx)
            if (inst.m.role[static_cast<std::size_t>(d)][idx] != cell_role::critical) {
                ++externals;
                CHECK(inst.m.rank[static_cast<std::size_t>(d)][idx] <= inst.ctx.l - 2);
            }
    CHECK(externals > 0);
    CHECK(verify_acyclic(inst.sub, inst.m).ok);
    lemma_check_report rep = check_lemmas(inst.sub, inst.ctx, inst.m);
    INFO(rep.detail);
    CHECK(rep.all_ok());
    CHECK(betti_equal(morse_betti(inst.sub, inst.m),
                      betti_numbers(inst.sub, coeff_field::mod2)));
}

TEST_CASE("lemma suite passes on mixed path and cycle instances") {
    for (const auto& [g, edge] : std::vector<std::pair<graph, std::string>>{
             {battery::cycle(4), "ab"},
             {battery::cycle(5), "cd"},
             {battery::theta(), "vx"},
             {battery::path(5), "bc"}}) {
        instance inst = make_instance(g, edge, 2, 2);
        lemma_check_report rep = check_lemmas(inst.sub, inst.ctx, inst.m);
        INFO(rep.detail);
        CHECK(rep.all_ok());
    }
}

TEST_CASE("matching export lists one record per cell") {
    instance inst = make_instance(pqrs(), "qr", 2, 2);
    std::ostringstream out;
    write_matching(out, inst.sub, inst.m);
    std::string text = out.str();
    std::size_t lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    CHECK(lines == inst.sub.total());
    CHECK(text.find("\"role\":\"redundant\"") != std::string::npos);
    CHECK(text.find("\"partner\"") != std::string::npos);
}
