#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "epciso/pipeline.hpp"

using namespace epciso;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitDomain = 65;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw DomainError("VALIDATION_ERROR", "cannot write " + path);
    out << content;
}

DwlTrace load_trace(const std::string& path, int budget_vertices, int budget_steps) {
    if (path == "-") {
        DwlTrace t;
        if (budget_vertices > 0) t.budget_vertices = budget_vertices;
        if (budget_steps > 0) t.budget_steps = budget_steps;
        return t;
    }
    DwlTrace t = parse_trace_file(path);
    if (budget_vertices > 0) t.budget_vertices = budget_vertices;
    if (budget_steps > 0) t.budget_steps = budget_steps;
    return t;
}

void apply_env_budgets(int& vertices, int& steps) {
    if (vertices <= 0)
        if (const char* e = std::getenv("EPCISO_BUDGET_VERTICES")) vertices = std::atoi(e);
    if (steps <= 0)
        if (const char* e = std::getenv("EPCISO_BUDGET_STEPS")) steps = std::atoi(e);
}

void print_state_table(const CloudState& st, int index) {
    std::cout << "state " << index << " vertices=" << st.structure.s.n
              << " left=" << st.structure.left_size << " right=" << st.structure.right_size
              << " colors=" << st.history.stable().num_colors
              << (st.distinguished() ? " DISTINGUISHED" : "") << "\n";
    const Layer& layer = st.history.stable();
    for (ColorId c = 0; c < layer.num_colors; ++c) {
        long nl = 0, nr = 0, nx = 0;
        for (Vertex u = 0; u < st.structure.s.n; ++u)
            for (Vertex v = 0; v < st.structure.s.n; ++v) {
                if (st.history.stable_color(u, v) != c) continue;
                bool lu = st.structure.is_left(u), lv = st.structure.is_left(v);
                if (lu && lv)
                    ++nl;
                else if (!lu && !lv)
                    ++nr;
                else
                    ++nx;
            }
        std::cout << "  color " << c << " diag=" << (layer.is_diag[static_cast<size_t>(c)] ? 1 : 0)
                  << " cross=" << (layer.is_cross[static_cast<size_t>(c)] ? 1 : 0) << " left=" << nl
                  << " right=" << nr << " crossing=" << nx << "\n";
    }
    std::cout << "sketch left:\n" << st.sketch_left.serialize();
    std::cout << "sketch right:\n" << st.sketch_right.serialize();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DWL-to-EPC3 graph-isomorphism refutation toolkit"};
    app.require_subcommand(1);
    int jobs = 1;
    long seed = 0;
    app.add_option("--jobs", jobs, "worker threads for refinement signatures");
    app.add_option("--seed", seed, "seed reserved for sampling helpers");

    std::string g_path, h_path, trace_path, out_path, report_path, base_path, proof_path;
    std::string mode_flag;
    bool restricted_flag = false, twist = false, ordered = false, verbose = false;
    int budget_vertices = 0, budget_steps = 0;

    auto* refine_cmd = app.add_subcommand("refine", "print the canonical sketch of a structure");
    refine_cmd->add_option("graph", g_path)->required();

    auto* piso_cmd = app.add_subcommand("piso", "print the isomorphism axiom system of a pair");
    piso_cmd->add_option("left", g_path)->required();
    piso_cmd->add_option("right", h_path)->required();

    auto* dwl_cmd = app.add_subcommand("dwl", "run a trace and print per-state sketches");
    dwl_cmd->add_option("left", g_path)->required();
    dwl_cmd->add_option("right", h_path)->required();
    dwl_cmd->add_option("trace", trace_path)->required();
    dwl_cmd->add_flag("-v,--verbose", verbose);
    dwl_cmd->add_option("--budget-vertices", budget_vertices);
    dwl_cmd->add_option("--budget-steps", budget_steps);

    auto* refute_cmd = app.add_subcommand("refute", "compile a trace into a checked refutation");
    refute_cmd->add_option("left", g_path)->required();
    refute_cmd->add_option("right", h_path)->required();
    refute_cmd->add_option("trace", trace_path)->required();
    refute_cmd->add_option("-o,--output", out_path, "proof output path");
    refute_cmd->add_option("--report", report_path, "machine-readable report path");
    refute_cmd->add_option("--budget-vertices", budget_vertices);
    refute_cmd->add_option("--budget-steps", budget_steps);

    auto* check_cmd = app.add_subcommand("check", "verify a proof file");
    check_cmd->add_option("proof", proof_path)->required();
    std::vector<std::string> axiom_graphs;
    check_cmd->add_option("--axioms", axiom_graphs, "the two graph files")->expected(2);
    check_cmd->add_option("--mode", mode_flag, "mc3|pc3|epc3 (defaults to the file header)");
    check_cmd->add_flag("--restricted", restricted_flag);

    auto* cfi_cmd = app.add_subcommand("cfi", "emit the CFI companions of a base graph");
    cfi_cmd->add_option("base", base_path)->required();
    cfi_cmd->add_flag("--twist", twist);
    cfi_cmd->add_flag("--ordered", ordered);
    cfi_cmd->add_option("-o,--output", out_path, "writes <prefix>.left.graph / <prefix>.right.graph");

    auto* oracle_cmd = app.add_subcommand("oracle", "dump the derivable-position closure");
    oracle_cmd->add_option("left", g_path)->required();
    oracle_cmd->add_option("right", h_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*refine_cmd) {
            Structure s = parse_structure_file(g_path);
            std::cout << sketch(refine(s, jobs)).serialize();
            return 0;
        }
        if (*piso_cmd) {
            UnionStructure gh =
                disjoint_union(parse_structure_file(g_path), parse_structure_file(h_path));
            PisoSystem sys = piso(gh);
            if (sys.color_count_mismatch)
                std::cerr << "warning: COLOR_COUNT_MISMATCH: vertex-colour classes differ in size\n";
            for (size_t i = 0; i < sys.axioms.size(); ++i) {
                const Axiom& ax = sys.axioms[i];
                const char* kind = ax.kind == AxiomKind::Row ? "row"
                                   : ax.kind == AxiomKind::Col ? "col"
                                                               : "local";
                std::cout << "axiom " << i << " " << kind;
                if (ax.kind != AxiomKind::Local) std::cout << " " << ax.vertex;
                std::cout << " :: " << ax.poly.str() << "\n";
            }
            return 0;
        }
        if (*dwl_cmd) {
            apply_env_budgets(budget_vertices, budget_steps);
            DwlTrace trace = load_trace(trace_path, budget_vertices, budget_steps);
            TraceRun run = run_trace(parse_structure_file(g_path), parse_structure_file(h_path),
                                     trace, jobs);
            for (size_t i = 0; i < run.states.size(); ++i) {
                if (verbose) {
                    print_state_table(run.states[i], static_cast<int>(i));
                } else {
                    std::cout << "state " << i << " vertices=" << run.states[i].structure.s.n
                              << " colors=" << run.states[i].history.stable().num_colors
                              << (run.states[i].distinguished() ? " DISTINGUISHED" : "") << "\n";
                }
            }
            std::cout << (run.outcome == TraceOutcome::Distinguished ? "DISTINGUISHED"
                                                                     : "NOT_DISTINGUISHED")
                      << "\n";
            return run.outcome == TraceOutcome::Distinguished ? 0 : 1;
        }
        if (*refute_cmd) {
            apply_env_budgets(budget_vertices, budget_steps);
            DwlTrace trace = load_trace(trace_path, budget_vertices, budget_steps);
            RefuteResult res = refute(parse_structure_file(g_path), parse_structure_file(h_path),
                                      trace, jobs);
            if (!report_path.empty()) write_file(report_path, res.report.to_text());
            std::cout << res.report.to_text();
            if (res.report.outcome != RefutationReport::Outcome::Refuted) return 1;
            if (!out_path.empty()) write_file(out_path, res.proof.serialize());
            return 0;
        }
        if (*check_cmd) {
            Proof proof = parse_proof_file(proof_path);
            if (axiom_graphs.size() != 2) {
                std::cerr << "check requires --axioms <g> <h>\n";
                return kExitUsage;
            }
            if (!mode_flag.empty()) proof.mode = parse_mode(mode_flag);
            if (restricted_flag) proof.restricted_ext = true;
            UnionStructure gh = disjoint_union(parse_structure_file(axiom_graphs[0]),
                                               parse_structure_file(axiom_graphs[1]));
            PisoSystem sys = piso(gh);
            CheckResult cr = check(proof, sys.axioms);
            if (!cr.accepted) {
                std::cout << "REJECT " << check_error_str(cr.error) << " step " << cr.failed_step
                          << ": " << cr.detail << "\n";
                return 2;
            }
            std::cout << (cr.refutation ? "ACCEPT REFUTATION" : "ACCEPT") << " size="
                      << cr.metrics.size << " bits=" << cr.metrics.bit_complexity
                      << " extensions=" << cr.metrics.extension_count
                      << " max_degree=" << cr.metrics.max_degree << "\n";
            return cr.refutation ? 0 : 1;
        }
        if (*cfi_cmd) {
            auto [a, b] = cfi_pair(parse_structure_file(base_path), twist, ordered);
            if (out_path.empty()) {
                std::cout << a.serialize() << b.serialize();
            } else {
                write_file(out_path + ".left.graph", a.serialize());
                write_file(out_path + ".right.graph", b.serialize());
            }
            return 0;
        }
        if (*oracle_cmd) {
            UnionStructure gh =
                disjoint_union(parse_structure_file(g_path), parse_structure_file(h_path));
            auto closure = derivable_closure_oracle(gh);
            for (const auto& pos : closure) {
                if (pos.empty()) {
                    std::cout << "pos -\n";
                    continue;
                }
                std::cout << "pos";
                for (auto [v, w] : pos) std::cout << " (" << v << "," << w << ")";
                std::cout << "\n";
            }
            std::cout << "total " << closure.size() << "\n";
            return 0;
        }
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitUsage;
}
