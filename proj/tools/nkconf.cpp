// nkconf: discrete models of no-k-equal configuration spaces on graphs.
//
// Subcommands:
//   check-subdiv  sufficiency report for a graph at parameters (k, n)
//   pipeline      subdivide one edge, build both complexes and the collapse
//                 pairing, run every verifier, report
//   stabilize     Betti numbers across iterated barycentric subdivisions
//
// Exit codes: 0 ok, 1 a verified property fails, 2 parse/input error,
// 3 sufficiency refusal, 4 cell budget exceeded.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nkconf/complex.hpp"
#include "nkconf/graph.hpp"
#include "nkconf/homology.hpp"
#include "nkconf/morse.hpp"
#include "nkconf/subdivision.hpp"

using nlohmann::json;

namespace {

struct run_config {
    std::string input;
    int k = 2;
    int n = 2;
    std::string edge;  // pipeline: edge to subdivide (default: first id)
    std::string field = "q";
    std::size_t budget = nkconf::default_cell_budget;
    int levels = 3;
    std::string out;
};

nkconf::coeff_field field_of(const run_config& cfg) {
    return cfg.field == "f2" ? nkconf::coeff_field::mod2 : nkconf::coeff_field::rational;
}

// Reports go to stdout; --out additionally writes a copy.
void emit(const json& report, const std::string& out_path) {
    std::string text = report.dump();
    std::cout << text << "\n";
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        if (!f) throw nkconf::input_error("cannot write " + out_path);
        f << text << "\n";
    }
}

json violations_json(const nkconf::subdiv_report& rep) {
    json out = json::array();
    for (const auto& v : rep.violations)
        out.push_back({{"kind", v.kind},
                       {"witness", v.witness},
                       {"touched", v.touched},
                       {"required", v.required}});
    return out;
}

int cmd_check_subdiv(const run_config& cfg) {
    nkconf::graph g = nkconf::graph::load(cfg.input);
    nkconf::subdiv_report rep = nkconf::check_sufficiently_subdivided(g, cfg.k, cfg.n);
    json report;
    report["ok"] = rep.ok;
    report["k"] = cfg.k;
    report["n"] = cfg.n;
    report["violations"] = violations_json(rep);
    emit(report, cfg.out);
    std::cerr << (rep.ok ? "sufficiently subdivided" : "NOT sufficiently subdivided") << " ("
              << rep.violations.size() << " violation(s))\n";
    return rep.ok ? 0 : 1;
}

int cmd_pipeline(const run_config& cfg) {
    nkconf::graph g = nkconf::graph::load(cfg.input);
    nkconf::subdiv_report suff = nkconf::check_sufficiently_subdivided(g, cfg.k, cfg.n);
    if (!suff.ok) {
        std::cerr << "refused: graph is not (" << cfg.k << "," << cfg.n
                  << ")-sufficiently subdivided\n";
        throw nkconf::sufficiency_error("pipeline requires a sufficiently subdivided graph");
    }
    if (g.num_edges() == 0) throw nkconf::input_error("graph has no edge to subdivide");
    std::string edge_id = cfg.edge.empty() ? g.edges().front().id : cfg.edge;
    std::string w = "w";
    for (int suffix = 0; g.has_vertex(w); ++suffix) w = "w" + std::to_string(suffix);
    nkconf::graph gs = nkconf::subdivide_edge(g, edge_id, w);
    nkconf::subdivision_context ctx = nkconf::locate_h(g, gs, w);

    nkconf::complex_view base = nkconf::enumerate_dconf(g, cfg.k, cfg.n, cfg.budget);
    nkconf::complex_view sub = nkconf::enumerate_dconf(gs, cfg.k, cfg.n, cfg.budget);
    nkconf::complex_view y = nkconf::build_y(ctx, base);
    nkconf::matching_record m = nkconf::build_matching(sub, ctx, y);

    nkconf::acyclicity_result acyc = nkconf::verify_acyclic(sub, m);
    bool crit_sub = nkconf::verify_critical_subcomplex(sub, m);
    nkconf::coherence_result coh = nkconf::verify_pair_coherence(sub, ctx, m);
    nkconf::lemma_check_report lemmas = nkconf::check_lemmas(sub, ctx, m);

    nkconf::coeff_field f = field_of(cfg);
    std::vector<long> b_g = nkconf::betti_numbers(base, f);
    std::vector<long> b_gs = nkconf::betti_numbers(sub, f);
    std::vector<long> b_y = nkconf::betti_numbers(y, f);
    std::vector<long> b_gs_f2 = f == nkconf::coeff_field::mod2
                                    ? b_gs
                                    : nkconf::betti_numbers(sub, nkconf::coeff_field::mod2);
    std::vector<long> b_morse = nkconf::morse_betti(sub, m);
    bool betti_equal = nkconf::betti_equal(b_g, b_gs) && nkconf::betti_equal(b_g, b_y) &&
                       nkconf::betti_equal(b_morse, b_gs_f2);

    json report;
    report["k"] = cfg.k;
    report["n"] = cfg.n;
    report["edge"] = edge_id;
    report["case"] = (ctx.hcase == nkconf::h_case::path ? "A" : "B");
    report["cells"] = sub.total();
    report["counts"] = sub.dim_counts();
    report["Y"] = y.total();
    report["external"] = m.num_external;
    report["critical"] = m.num_critical;
    report["pairs"] = m.num_pairs;
    report["acyclic"] = acyc.ok;
    report["critical_equals_Y"] = true;  // certified by construction or refused
    report["critical_subcomplex"] = crit_sub;
    report["coherent"] = coh.ok;
    report["lemma_checks"] = json::parse(lemmas.to_json_text());
    report["betti"] = {{"coeff", nkconf::field_name(f)},
                       {"g", b_g},
                       {"g_sub", b_gs},
                       {"y", b_y},
                       {"morse_f2", b_morse}};
    report["betti_equal"] = betti_equal;

    bool all_ok = acyc.ok && crit_sub && coh.ok && lemmas.all_ok() && betti_equal;

    if (!cfg.out.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(cfg.out);
        std::ofstream(cfg.out + "/context.json") << ctx.to_json_text() << "\n";
        std::ofstream f1(cfg.out + "/complex_base.cells");
        nkconf::write_cell_stream(f1, base);
        std::ofstream f2(cfg.out + "/complex_subdivided.cells");
        nkconf::write_cell_stream(f2, sub);
        std::ofstream f3(cfg.out + "/y.cells");
        nkconf::write_cell_stream(f3, y);
        std::ofstream f4(cfg.out + "/matching.jsonl");
        nkconf::write_matching(f4, sub, m);
        for (int d = 1; d <= sub.max_dim(); ++d) {
            std::ofstream f5(cfg.out + "/boundary_" + std::to_string(d) + ".txt");
            nkconf::write_triplets(f5, nkconf::boundary_matrix(sub, d, f));
        }
        long euler = nkconf::euler_characteristic(sub);
        std::ofstream(cfg.out + "/betti.json") << nkconf::betti_json(b_gs, f, euler) << "\n";
    }
    emit(report, cfg.out.empty() ? "" : cfg.out + "/report.json");
    std::cerr << "cells " << sub.total() << ", Y " << y.total() << ", pairs " << m.num_pairs
              << ", acyclic " << (acyc.ok ? "yes" : "NO") << ", betti "
              << (betti_equal ? "stable" : "UNSTABLE") << "\n";
    return all_ok ? 0 : 1;
}

int cmd_stabilize(const run_config& cfg) {
    nkconf::graph g = nkconf::graph::load(cfg.input);
    nkconf::coeff_field f = field_of(cfg);
    json rows = json::array();
    int first_sufficient = -1;
    std::vector<long> reference;
    bool constant = true;

    nkconf::graph level_graph = g;
    for (int j = 0; j <= cfg.levels; ++j) {
        if (j > 0) level_graph = nkconf::barycentric_subdivision(level_graph);
        nkconf::subdiv_report rep =
            nkconf::check_sufficiently_subdivided(level_graph, cfg.k, cfg.n);
        json row;
        row["level"] = j;
        row["vertices"] = level_graph.num_vertices();
        row["edges"] = level_graph.num_edges();
        row["sufficient"] = rep.ok;
        nkconf::complex_view cv = nkconf::enumerate_dconf(level_graph, cfg.k, cfg.n, cfg.budget);
        row["cells"] = cv.total();
        try {
            row["betti"] = nkconf::betti_numbers(cv, f);
        } catch (const nkconf::input_error&) {
            row["betti"] = nullptr;  // loops present at this level
        }
        if (rep.ok && first_sufficient < 0) {
            first_sufficient = j;
            reference = row["betti"].get<std::vector<long>>();
        } else if (first_sufficient >= 0 && !row["betti"].is_null()) {
            if (!nkconf::betti_equal(reference, row["betti"].get<std::vector<long>>()))
                constant = false;
        }
        rows.push_back(row);
    }

    json report;
    report["k"] = cfg.k;
    report["n"] = cfg.n;
    report["coeff"] = nkconf::field_name(f);
    report["levels"] = rows;
    if (first_sufficient >= 0)
        report["first_sufficient"] = first_sufficient;
    else
        report["first_sufficient"] = nullptr;
    report["betti_constant_from_sufficiency"] = constant;
    emit(report, cfg.out);
    std::cerr << "first sufficient level: "
              << (first_sufficient >= 0 ? std::to_string(first_sufficient) : "none")
              << ", betti " << (constant ? "constant" : "NOT constant") << "\n";
    return constant ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete no-k-equal configuration spaces on graphs"};
    app.require_subcommand(1);
    run_config cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", cfg.input, "graph JSON file")->required();
        sub->add_option("--k", cfg.k, "collision multiplicity bound")->required();
        sub->add_option("--n", cfg.n, "number of particles")->required();
        sub->add_option("--budget", cfg.budget, "cell budget");
        sub->add_option("--out", cfg.out, "output path");
    };

    CLI::App* check = app.add_subcommand("check-subdiv", "sufficiency report");
    add_common(check);

    CLI::App* pipe = app.add_subcommand("pipeline", "full verification of one subdivision");
    add_common(pipe);
    pipe->add_option("--edge", cfg.edge, "edge to subdivide (default: first)");
    pipe->add_option("--field", cfg.field, "coefficients: q or f2")
        ->check(CLI::IsMember({"q", "f2"}));

    CLI::App* stab = app.add_subcommand("stabilize", "Betti table across subdivisions");
    add_common(stab);
    stab->add_option("--levels", cfg.levels, "number of barycentric levels");
    stab->add_option("--field", cfg.field, "coefficients: q or f2")
        ->check(CLI::IsMember({"q", "f2"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (check->parsed()) return cmd_check_subdiv(cfg);
        if (pipe->parsed()) return cmd_pipeline(cfg);
        if (stab->parsed()) return cmd_stabilize(cfg);
    } catch (const nkconf::budget_error& e) {
        std::cerr << "budget: " << e.what() << "\n";
        return 4;
    } catch (const nkconf::sufficiency_error& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 3;
    } catch (const nkconf::verification_error& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 1;
    } catch (const nkconf::input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
