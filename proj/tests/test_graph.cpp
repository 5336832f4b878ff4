#include <doctest.h>

#include <algorithm>
#include <set>

#include "battery.hpp"
#include "nkconf/graph.hpp"
#include "nkconf/subdivision.hpp"

using namespace nkconf;

TEST_CASE("degree counts endpoint incidences, loops twice") {
    graph fig = battery::figure_graph();
    CHECK(degree(fig, "a") == 1);
    CHECK(degree(fig, "b") == 3);
    CHECK(degree(fig, "c") == 2);

    graph p3 = battery::path(3);  // a-b-c
    CHECK(degree(p3, "b") == 2);

    graph lp = battery::loop_graph();
    CHECK(degree(lp, "u") == 2);

    CHECK_THROWS_AS(degree(p3, "zz"), input_error);
}

TEST_CASE("degree sum equals twice the edge count") {
    for (const auto& [name, g] : battery::all()) {
        int sum = 0;
        for (const auto& v : g.vertices()) sum += degree(g, v);
        CHECK(sum == 2 * static_cast<int>(g.num_edges()));
    }
}

TEST_CASE("essential vertices are exactly those of degree != 2") {
    graph fig = battery::figure_graph();
    auto ess = essential_vertices(fig);
    CHECK(ess == std::vector<std::string>{"a", "b"});

    CHECK(essential_vertices(battery::cycle(5)).empty());

    auto star_ess = essential_vertices(battery::star(3));
    CHECK(star_ess.size() == 4);  // center (3) and every leaf (1)
}

TEST_CASE("primitive graph of a cycle is a single loop") {
    auto res = primitive_graph(battery::cycle(4));
    CHECK(res.primitive.num_vertices() == 1);
    CHECK(res.primitive.num_edges() == 1);
    CHECK(res.primitive.vertices().front() == "a");  // least label survives
    CHECK(res.primitive.edges().front().is_loop());
    REQUIRE(res.cover.size() == 1);
    CHECK(res.cover[0].walk_vertices.front() == "a");
    CHECK(res.cover[0].walk_vertices.back() == "a");
    CHECK(res.cover[0].walk_edges.size() == 4);
}

TEST_CASE("primitive graph smooths interior path vertices") {
    auto res = primitive_graph(battery::path(4));  // a-b-c-d
    CHECK(res.primitive.num_vertices() == 2);
    CHECK(res.primitive.num_edges() == 1);
    REQUIRE(res.cover.size() == 1);
    CHECK(res.cover[0].walk_vertices == std::vector<std::string>{"a", "b", "c", "d"});
}

TEST_CASE("primitive graph keeps loops and parallel edges that smoothing creates") {
    // eight vertices; degree-2 chains a-b-c, c-e-f, f-g-h-f
    graph g({"a", "b", "c", "d", "e", "f", "g", "h"},
            {{"ab", "a", "b"},
             {"bc", "b", "c"},
             {"cd", "c", "d"},
             {"ce", "c", "e"},
             {"ef", "e", "f"},
             {"cf", "c", "f"},
             {"fg", "f", "g"},
             {"fh", "f", "h"},
             {"gh", "g", "h"}});
    auto res = primitive_graph(g);
    CHECK(res.primitive.num_vertices() == 4);  // a, c, d, f
    CHECK(res.primitive.num_edges() == 5);
    int loops = 0;
    std::multiset<std::pair<std::string, std::string>> pairs;
    for (const auto& e : res.primitive.edges()) {
        loops += e.is_loop();
        pairs.insert({e.u, e.v});
    }
    CHECK(loops == 1);
    CHECK(pairs.count({"c", "f"}) == 2);  // doubled edge
}

TEST_CASE("primitive graph keeps a loop hanging at an essential vertex") {
    graph g({"u", "v"}, {{"loop", "u", "u"}, {"uv", "u", "v"}});
    auto res = primitive_graph(g);
    CHECK(res.primitive.num_vertices() == 2);
    CHECK(res.primitive.num_edges() == 2);
    int loops = 0;
    for (const auto& e : res.primitive.edges()) loops += e.is_loop();
    CHECK(loops == 1);
}

TEST_CASE("primitive graph is idempotent up to isomorphism") {
    auto iso_key = [](const graph& g) {
        std::multiset<std::pair<std::string, std::string>> pairs;
        for (const auto& e : g.edges()) pairs.insert({e.u, e.v});
        return std::make_pair(g.vertices(), pairs);
    };
    for (const auto& [name, g] : battery::all()) {
        auto once = primitive_graph(g);
        auto twice = primitive_graph(once.primitive);
        CHECK(iso_key(once.primitive) == iso_key(twice.primitive));
    }
}

TEST_CASE("sufficiency: figure graph fails at (k,n)=(n-1,n) and heals after insertions") {
    graph fig = battery::figure_graph();
    subdiv_report rep = check_sufficiently_subdivided(fig, 2, 3);
    CHECK_FALSE(rep.ok);
    REQUIRE(rep.violations.size() == 2);
    std::multiset<std::string> kinds;
    for (const auto& v : rep.violations) kinds.insert(v.kind);
    CHECK(kinds == std::multiset<std::string>{"cycle", "path"});
    for (const auto& v : rep.violations) {
        if (v.kind == "path") {
            CHECK(v.touched == 2);
            CHECK(v.required == 3);
        } else {
            CHECK(v.touched == 2);
            CHECK(v.required == 4);
        }
    }

    // one vertex on ab, two on the essential b-c cycle
    graph healed = subdivide_edge(fig, "ab", "w1");
    healed = subdivide_edge(healed, "bc1", "w2");
    healed = subdivide_edge(healed, "bc2", "w3");
    CHECK(check_sufficiently_subdivided(healed, 2, 3).ok);
}

TEST_CASE("sufficiency: any simple graph is (n,n)-sufficiently subdivided") {
    for (const auto& [name, g] : battery::all())
        for (int n = 2; n <= 4; ++n) CHECK(check_sufficiently_subdivided(g, n, n).ok);
}

TEST_CASE("sufficiency: loops always violate for n >= k") {
    graph lp = battery::loop_graph();
    subdiv_report rep = check_sufficiently_subdivided(lp, 2, 2);
    CHECK_FALSE(rep.ok);
    REQUIRE(!rep.violations.empty());
    CHECK(rep.violations[0].kind == "cycle");
    CHECK(rep.violations[0].touched == 1);
}

TEST_CASE("sufficiency implies simple") {
    for (const auto& [name, g] : battery::all())
        for (int n = 2; n <= 4; ++n)
            for (int k = 2; k <= n; ++k)
                if (check_sufficiently_subdivided(g, k, n).ok) CHECK(g.simple());
    CHECK_FALSE(check_sufficiently_subdivided(battery::figure_graph(), 2, 2).ok);
}

TEST_CASE("sufficiency is monotone under single-edge subdivision") {
    for (const auto& [name, g] : battery::all()) {
        for (int n = 2; n <= 4; ++n) {
            for (int k = 2; k <= n; ++k) {
                if (!check_sufficiently_subdivided(g, k, n).ok) continue;
                for (const auto& e : g.edges()) {
                    graph sub = subdivide_edge(g, e.id, "w");
                    CHECK(check_sufficiently_subdivided(sub, k, n).ok);
                }
            }
        }
    }
}

TEST_CASE("sufficiency rejects invalid parameters and disconnected graphs") {
    CHECK_THROWS_AS(check_sufficiently_subdivided(battery::path(3), 1, 2), input_error);
    CHECK_THROWS_AS(check_sufficiently_subdivided(battery::path(3), 3, 2), input_error);
    graph two({"a", "b"}, {});
    CHECK_THROWS_AS(check_sufficiently_subdivided(two, 2, 2), input_error);
    CHECK_THROWS_AS(primitive_graph(two), input_error);
}

TEST_CASE("graph JSON round trip is order-insensitive") {
    graph g = graph::from_json_text(
        R"({"edges":[{"id":"bc","ends":["c","b"]},{"id":"ab","ends":["a","b"]}],)"
        R"("vertices":["b","c","a"]})");
    CHECK(g.num_vertices() == 3);
    CHECK(g.num_edges() == 2);
    CHECK(g.edge("bc").u == "b");
    graph again = graph::from_json_text(g.to_json_text());
    CHECK(graph_hash(again) == graph_hash(g));

    CHECK_THROWS_AS(graph::from_json_text("not json"), input_error);
    CHECK_THROWS_AS(graph::from_json_text(R"({"vertices":["a"],"edges":[]}x)"), input_error);
    CHECK_THROWS_AS(graph::from_json_text(
                        R"({"vertices":["a"],"edges":[{"id":"e","ends":["a","zz"]}]})"),
                    input_error);
    CHECK_THROWS_AS(
        graph::from_json_text(
            R"({"vertices":["a","b"],"edges":[{"id":"e","ends":["a","b"]},{"id":"e","ends":["a","b"]}]})"),
        input_error);
}
