// sforest: command-line front end for the Steiner forest toolkit.
//
// Subcommands: solve, detect, classify-h, classify-deletion, gen-hard,
// verify-hard, reduce. Output is tab-separated key/value lines; --json emits
// the same data as one JSON object. Exit codes: 0 ok, 1 failed check or
// internal error, 2 infeasible instance, 3 parse/usage error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "steiner/dichotomy.hpp"
#include "steiner/dispatch.hpp"
#include "steiner/errors.hpp"
#include "steiner/hardness.hpp"
#include "steiner/hspec.hpp"
#include "steiner/io.hpp"
#include "steiner/oracle.hpp"

namespace {

using nlohmann::json;

struct SolveArgs {
    std::string graph, terms;
    std::string method = "auto";
    steiner::SolveOptions opt;
};

int run_solve(const SolveArgs& a, bool as_json) {
    steiner::GraphFile gf = steiner::read_graph_file(a.graph);
    steiner::TerminalSet t = steiner::read_terminals_file(a.terms);
    steiner::SolveOptions opt = a.opt;
    opt.method = *steiner::parse_method(a.method);  // pre-validated by CLI11
    steiner::SolveReport r = steiner::dispatch_solve(gf.graph, t, opt);
    if (as_json) {
        json j;
        j["size"] = r.size;
        j["edges"] = json::array();
        for (auto [u, v] : r.edges) j["edges"].push_back({u, v});
        j["trace"] = json::array();
        for (const auto& e : r.trace) {
            json je{{"step", e.step}, {"note", e.note}};
            if (e.size >= 0) je["size"] = e.size;
            j["trace"].push_back(std::move(je));
        }
        j["time_ms"] = r.wall_ms;
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "size\t" << r.size << "\n";
        for (auto [u, v] : r.edges) std::cout << "edge\t" << u << " " << v << "\n";
        for (const auto& e : r.trace) {
            std::cout << "trace\t" << e.step << "\t" << e.note << "\t";
            if (e.size >= 0) std::cout << e.size;
            else std::cout << "-";
            std::cout << "\n";
        }
        std::cout << "time-ms\t" << r.wall_ms << "\n";
    }
    return 0;
}

int run_detect(const std::string& path, const steiner::SolveOptions& opt, bool as_json) {
    steiner::GraphFile gf = steiner::read_graph_file(path);
    steiner::DetectReport r = steiner::probe(gf.graph, opt);
    if (as_json) {
        json j;
        j["tw2"] = r.tw2;
        j["longest_path"] = r.longest_path;
        j["tangle"] = r.tangle_stems ? json{{"stems", *r.tangle_stems}} : json();
        j["cycle_bush"] = r.cycle_stems ? json{{"stems", *r.cycle_stems}} : json();
        j["path_bush"] =
            r.path_citruses ? json{{"citruses", *r.path_citruses}} : json();
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "tw2\t" << (r.tw2 ? "yes" : "no") << "\n";
        std::cout << "longest-path\t" << r.longest_path << "\n";
        if (r.tangle_stems)
            std::cout << "tangle\tyes\tstems=" << *r.tangle_stems << "\n";
        else
            std::cout << "tangle\tno\n";
        if (r.cycle_stems)
            std::cout << "cycle-bush\tyes\tstems=" << *r.cycle_stems << "\n";
        else
            std::cout << "cycle-bush\tno\n";
        if (r.path_citruses)
            std::cout << "path-bush\tyes\tcitruses=" << *r.path_citruses << "\n";
        else
            std::cout << "path-bush\tno\n";
    }
    return 0;
}

int emit_verdict(const steiner::Verdict& v, bool as_json) {
    if (as_json) {
        json j{{"verdict", steiner::to_string(v.answer)}, {"witness", v.witness}};
        std::cout << j.dump() << "\n";
    } else {
        std::cout << steiner::to_string(v.answer) << "\t" << v.witness << "\n";
    }
    return 0;
}

int run_classify_h(const std::string& arg, bool connected_only, bool as_json) {
    steiner::Verdict v;
    if (std::filesystem::exists(arg)) {
        steiner::GraphFile gf = steiner::read_graph_file(arg);
        v = steiner::classify_h(gf.graph, connected_only);
    } else {
        v = steiner::classify_h(steiner::parse_hspec(arg), connected_only);
    }
    return emit_verdict(v, as_json);
}

struct GenHardArgs {
    std::string from, input, prefix = "hard";
    std::string emit_csp;
};

int run_gen_hard(const GenHardArgs& a, bool as_json) {
    steiner::CspInstance csp =
        a.from == "3col"
            ? steiner::three_col_to_csp(steiner::read_graph_file(a.input).graph)
            : steiner::read_csp_file(a.input);
    csp = steiner::pad_csp(csp);
    steiner::HardInstance h = steiner::csp_to_sf(csp);
    std::string graph_path = a.prefix + ".graph", terms_path = a.prefix + ".terms";
    steiner::write_graph_file(graph_path, h.graph, steiner::hard_roles(h), h.budget);
    steiner::write_terminals_file(terms_path, h.terminals);
    if (!a.emit_csp.empty()) steiner::write_csp_file(a.emit_csp, csp);
    if (as_json) {
        json j{{"graph", graph_path},
               {"terminals", terms_path},
               {"n", h.graph.vertex_count()},
               {"m", h.graph.edge_count()},
               {"pairs", h.terminals.size()},
               {"budget", h.budget},
               {"csp_vars", csp.n},
               {"csp_unary", csp.unary.size()},
               {"csp_binary", csp.binary.size()}};
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "graph\t" << graph_path << "\n";
        std::cout << "terminals\t" << terms_path << "\n";
        std::cout << "n\t" << h.graph.vertex_count() << "\n";
        std::cout << "m\t" << h.graph.edge_count() << "\n";
        std::cout << "pairs\t" << h.terminals.size() << "\n";
        std::cout << "budget\t" << h.budget << "\n";
        std::cout << "csp-vars\t" << csp.n << "\n";
        std::cout << "csp-unary\t" << csp.unary.size() << "\n";
        std::cout << "csp-binary\t" << csp.binary.size() << "\n";
    }
    return 0;
}

int run_verify_hard(const std::string& graph_path, const std::string& terms_path,
                    bool as_json) {
    steiner::GraphFile gf = steiner::read_graph_file(graph_path);
    steiner::TerminalSet t = steiner::read_terminals_file(terms_path);
    steiner::HardInstance h = steiner::hard_from_file(gf, std::move(t));

    bool del_ok = steiner::check_deletion_set(
        h.graph, {h.d[0], h.d[1], h.d[2]}, 2);
    bool tw3_ok = steiner::check_tw3_certificate(h);
    bool failed = !del_ok || !tw3_ok;

    std::optional<int> optimum;   // nullopt: skipped; -1: infeasible
    std::optional<std::vector<int>> assignment;
    bool within = false, decode_failed = false;
    if (h.graph.vertex_count() <= steiner::detail::FullSetDp::kMaxVertices) {
        try {
            steiner::SteinerForest f = steiner::solve_exact(h.graph, h.terminals);
            optimum = f.size();
            within = f.size() <= h.budget;
            if (within) {
                assignment = steiner::decode_assignment(h, f);
                if (!assignment) decode_failed = true;  // theory violation
            }
        } catch (const steiner::InfeasibleError&) {
            optimum = -1;
        }
    }
    if (decode_failed) failed = true;

    if (as_json) {
        json j;
        j["budget"] = h.budget;
        j["deletion_set"] = del_ok;
        j["tw3"] = tw3_ok;
        if (!optimum) j["optimum"] = nullptr;
        else if (*optimum < 0) j["optimum"] = "infeasible";
        else j["optimum"] = *optimum;
        j["within_budget"] = within;
        if (assignment) j["assignment"] = *assignment;
        else if (decode_failed) j["assignment"] = nullptr;
        j["ok"] = !failed;
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "budget\t" << h.budget << "\n";
        std::cout << "deletion-set\t" << (del_ok ? "ok" : "FAIL") << "\n";
        std::cout << "tw3\t" << (tw3_ok ? "ok" : "FAIL") << "\n";
        if (!optimum) {
            std::cout << "optimum\tskipped\n";
        } else if (*optimum < 0) {
            std::cout << "optimum\tinfeasible\n";
        } else {
            std::cout << "optimum\t" << *optimum << "\n";
            std::cout << "within-budget\t" << (within ? "yes" : "no") << "\n";
        }
        if (assignment) {
            std::cout << "assignment\t";
            for (size_t i = 0; i < assignment->size(); ++i)
                std::cout << (i ? " " : "") << (*assignment)[i];
            std::cout << "\n";
        } else if (decode_failed) {
            std::cout << "assignment\tFAIL\n";
        }
    }
    return failed ? 1 : 0;
}

struct ReduceArgs {
    std::string graph, terms;
    std::string out_graph, out_terms;
};

int run_reduce(const ReduceArgs& a, bool as_json) {
    steiner::GraphFile gf = steiner::read_graph_file(a.graph);
    steiner::TerminalSet t = steiner::read_terminals_file(a.terms);
    steiner::DominationReduction dom = steiner::remove_dominated(gf.graph, t);
    steiner::WedgeTransformResult wt =
        steiner::wedge_transform(dom.sub.graph, dom.terminals);
    if (!a.out_graph.empty()) steiner::write_graph_file(a.out_graph, wt.graph);
    if (!a.out_terms.empty())
        steiner::write_terminals_file(a.out_terms, dom.terminals);
    if (as_json) {
        json j;
        j["removed"] = dom.removed;  // original ids
        j["deleted"] = json::array();
        for (auto [u, v] : wt.deleted) j["deleted"].push_back({u, v});  // reduced ids
        j["n"] = wt.graph.vertex_count();
        j["m"] = wt.graph.edge_count();
        j["pairs"] = dom.terminals.size();
        if (!a.out_graph.empty()) j["graph"] = a.out_graph;
        if (!a.out_terms.empty()) j["terminals"] = a.out_terms;
        std::cout << j.dump() << "\n";
    } else {
        for (int v : dom.removed) std::cout << "removed\t" << v << "\n";
        for (auto [u, v] : wt.deleted) std::cout << "deleted\t" << u << " " << v << "\n";
        std::cout << "n\t" << wt.graph.vertex_count() << "\n";
        std::cout << "m\t" << wt.graph.edge_count() << "\n";
        std::cout << "pairs\t" << dom.terminals.size() << "\n";
        if (!a.out_graph.empty()) std::cout << "graph\t" << a.out_graph << "\n";
        if (!a.out_terms.empty()) std::cout << "terminals\t" << a.out_terms << "\n";
    }
    return 0;
}

void check_order(const std::string& order) {
    std::string seen;
    for (char c : order) {
        if (c < 'a' || c > 'd' || seen.find(c) != std::string::npos)
            throw steiner::ParseError("--order must be a subsequence of 'abcd'");
        seen += c;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steiner forest toolkit"};
    app.require_subcommand(1);
    bool as_json = false;

    auto add_json = [&](CLI::App* cmd) {
        cmd->add_flag("--json", as_json, "emit one JSON object instead of lines");
    };

    SolveArgs solve_args;
    auto* solve_cmd = app.add_subcommand("solve", "solve a Steiner forest instance");
    solve_cmd->add_option("GRAPH", solve_args.graph, "graph file")->required();
    solve_cmd->add_option("TERMS", solve_args.terms, "terminal pairs file")->required();
    solve_cmd->add_option("--method", solve_args.method, "per-block solver")
        ->check(CLI::IsMember({"auto", "tw2", "tangle", "cycle", "path", "exact"}));
    solve_cmd->add_option("--order", solve_args.opt.order,
                          "detector order for auto (subsequence of abcd)");
    solve_cmd->add_option("--stem-bound", solve_args.opt.stem_bound,
                          "largest longest-path stem set the tangle detector accepts");
    solve_cmd->add_option("--wedge-budget", solve_args.opt.wedge_budget,
                          "pulped wedge size and count bound for lemon acceptance");
    add_json(solve_cmd);

    std::string detect_path;
    steiner::SolveOptions detect_opt;
    auto* detect_cmd = app.add_subcommand("detect", "report which detectors claim a graph");
    detect_cmd->add_option("GRAPH", detect_path, "graph file")->required();
    detect_cmd->add_option("--stem-bound", detect_opt.stem_bound);
    detect_cmd->add_option("--wedge-budget", detect_opt.wedge_budget);
    add_json(detect_cmd);

    std::string classify_arg;
    bool connected_only = false;
    auto* ch_cmd = app.add_subcommand(
        "classify-h", "complexity of Steiner forest on H-subgraph-free graphs");
    ch_cmd->add_option("H", classify_arg, "pattern spec (P11, S2,3,5, S1,1,1+P4) or graph file")
        ->required();
    ch_cmd->add_flag("--connected", connected_only, "reject disconnected patterns");
    add_json(ch_cmd);

    int del_c = 0, del_k = 0;
    auto* cd_cmd = app.add_subcommand(
        "classify-deletion", "complexity for graphs with a k-deletion set to components of size c");
    cd_cmd->add_option("C", del_c, "component size bound")->required();
    cd_cmd->add_option("K", del_k, "deletion set size")->required();
    add_json(cd_cmd);

    GenHardArgs gen_args;
    auto* gen_cmd = app.add_subcommand("gen-hard", "emit a hard Steiner forest instance");
    gen_cmd->add_option("--from", gen_args.from, "source reduction")
        ->check(CLI::IsMember({"3col", "csp"}))
        ->required();
    gen_cmd->add_option("INPUT", gen_args.input, "graph file (3col) or csp file")
        ->required();
    gen_cmd->add_option("-o,--output", gen_args.prefix, "output file prefix");
    gen_cmd->add_option("--emit-csp", gen_args.emit_csp, "also write the padded CSP");
    add_json(gen_cmd);

    std::string verify_graph, verify_terms;
    auto* verify_cmd =
        app.add_subcommand("verify-hard", "check certificates of a generated instance");
    verify_cmd->add_option("GRAPH", verify_graph, "annotated graph file")->required();
    verify_cmd->add_option("TERMS", verify_terms, "terminal pairs file")->required();
    add_json(verify_cmd);

    ReduceArgs reduce_args;
    auto* reduce_cmd = app.add_subcommand("reduce", "apply the safe reductions");
    reduce_cmd->add_option("GRAPH", reduce_args.graph, "graph file")->required();
    reduce_cmd->add_option("TERMS", reduce_args.terms, "terminal pairs file")->required();
    reduce_cmd->add_option("--out-graph", reduce_args.out_graph, "write the reduced graph");
    reduce_cmd->add_option("--out-terms", reduce_args.out_terms, "write the reduced terminals");
    add_json(reduce_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        check_order(solve_args.opt.order);
        if (*solve_cmd) return run_solve(solve_args, as_json);
        if (*detect_cmd) return run_detect(detect_path, detect_opt, as_json);
        if (*ch_cmd) return run_classify_h(classify_arg, connected_only, as_json);
        if (*cd_cmd)
            return emit_verdict(steiner::classify_deletion(del_c, del_k), as_json);
        if (*gen_cmd) return run_gen_hard(gen_args, as_json);
        if (*verify_cmd) return run_verify_hard(verify_graph, verify_terms, as_json);
        if (*reduce_cmd) return run_reduce(reduce_args, as_json);
    } catch (const steiner::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const steiner::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
