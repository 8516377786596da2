#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "citrus.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "lemon_solvers.hpp"
#include "oracle.hpp"
#include "paths.hpp"
#include "reductions.hpp"
#include "sp_solver.hpp"
#include "tangle.hpp"
#include "terminals.hpp"

namespace steiner {

// Per-piece solver selection. Auto walks the detector chain; the rest force
// one solver and fail loudly when its detector rejects the piece.
enum class SolveMethod { Auto, Tw2, Tangle, Cycle, Path, Exact };

inline std::string to_string(SolveMethod m) {
    switch (m) {
        case SolveMethod::Auto: return "auto";
        case SolveMethod::Tw2: return "tw2";
        case SolveMethod::Tangle: return "tangle";
        case SolveMethod::Cycle: return "cycle";
        case SolveMethod::Path: return "path";
        case SolveMethod::Exact: return "exact";
    }
    return "?";
}

inline std::optional<SolveMethod> parse_method(const std::string& s) {
    for (SolveMethod m : {SolveMethod::Auto, SolveMethod::Tw2, SolveMethod::Tangle,
                          SolveMethod::Cycle, SolveMethod::Path, SolveMethod::Exact})
        if (s == to_string(m)) return m;
    return std::nullopt;
}

struct SolveOptions {
    SolveMethod method = SolveMethod::Auto;
    // Detector chain for Auto, cheapest first: a = tw2, b = entangled bush on
    // the longest path, c = cycle bush, d = path bush. Any subsequence or
    // permutation; the exact fallback always comes last.
    std::string order = "abcd";
    // The tangle detector only offers the longest path as a stem set when the
    // path has at most this many vertices; pattern enumeration is exponential
    // in the stem count.
    int stem_bound = 13;
    // Wedge budget ell for lemon acceptance: pulped wedges may have at most
    // ell vertices and at most ell per citrus.
    int wedge_budget = 8;
};

// One pipeline step. Solver entries (size >= 0) carry the exact sub-instance
// they solved so the run can be replayed; analysis entries carry size -1.
struct TraceEntry {
    std::string step;
    std::string note;
    int size = -1;
    Graph graph{0, {}};
    TerminalSet terminals;
};

struct SolveReport {
    int size = 0;
    std::vector<Edge> edges;  // sorted, in input ids
    std::vector<TraceEntry> trace;
    double wall_ms = 0.0;
};

inline bool used_fallback(const SolveReport& r) {
    for (const auto& e : r.trace)
        if (e.step == "ExponentialFallback") return true;
    return false;
}

namespace detail {

inline std::string instance_note(const Graph& g, const TerminalSet& t) {
    std::ostringstream os;
    os << "n=" << g.vertex_count() << " m=" << g.edge_count() << " pairs=" << t.size();
    return os.str();
}

// Solve one reduced piece with the chosen method, recording a solver entry.
inline SteinerForest solve_reduced(const Graph& g, const TerminalSet& t,
                                   const SolveOptions& opt,
                                   std::vector<TraceEntry>& trace) {
    const int ell = opt.wedge_budget;
    auto record = [&](const std::string& step, const SteinerForest& f) {
        TraceEntry e;
        e.step = step;
        e.note = instance_note(g, t);
        e.size = f.size();
        e.graph = g;
        e.terminals = t;
        trace.push_back(std::move(e));
    };

    auto tangle_bush = [&]() -> std::optional<BushDecomposition> {
        std::vector<int> stems = longest_path(g).vertices;
        if (static_cast<int>(stems.size()) > opt.stem_bound) return std::nullopt;
        return try_entangled_stems(g, stems, ell);
    };
    auto cycle_bush = [&]() -> std::optional<BushDecomposition> {
        try {
            return detect_cycle_bush(g, ell);
        } catch (const TooLargeError&) {
            return std::nullopt;  // detection gave up; not a rejection we trust
        }
    };

    switch (opt.method) {
        case SolveMethod::Tw2: {
            SteinerForest f = solve_tw2(g, t);
            record("tw2", f);
            return f;
        }
        case SolveMethod::Tangle: {
            auto bush = tangle_bush();
            if (!bush)
                throw NotALemonError("no entangled bush on the longest path (bound " +
                                     std::to_string(opt.stem_bound) + ")");
            SteinerForest f = solve_entangled(g, *bush, t, ell);
            record("tangle", f);
            return f;
        }
        case SolveMethod::Cycle: {
            auto bush = detect_cycle_bush(g, ell);
            if (!bush) throw NotALemonError("no cycle bush found");
            SteinerForest f = solve_cycle_bush(g, *bush, t, ell);
            record("cycle-bush", f);
            return f;
        }
        case SolveMethod::Path: {
            auto bush = detect_path_bush(g, ell);
            if (!bush) throw NotALemonError("no path bush found");
            SteinerForest f = solve_path_bush(g, *bush, t, ell);
            record("path-bush", f);
            return f;
        }
        case SolveMethod::Exact: {
            SteinerForest f = solve_exact(g, t);
            record("exact", f);
            return f;
        }
        case SolveMethod::Auto:
            break;
    }

    for (char d : opt.order) {
        if (d == 'a' && treewidth_at_most_2(g)) {
            SteinerForest f = solve_tw2(g, t);
            record("tw2", f);
            return f;
        }
        if (d == 'b') {
            if (auto bush = tangle_bush()) {
                SteinerForest f = solve_entangled(g, *bush, t, ell);
                record("tangle", f);
                return f;
            }
        }
        if (d == 'c') {
            if (auto bush = cycle_bush()) {
                SteinerForest f = solve_cycle_bush(g, *bush, t, ell);
                record("cycle-bush", f);
                return f;
            }
        }
        if (d == 'd') {
            if (auto bush = detect_path_bush(g, ell)) {
                SteinerForest f = solve_path_bush(g, *bush, t, ell);
                record("path-bush", f);
                return f;
            }
        }
    }

    SteinerForest f = solve_exact(g, t);
    record("ExponentialFallback", f);
    return f;
}

}  // namespace detail

// Auto-dispatching solver. Pipeline: group demands into schools, split the
// graph into connected components and those into 2-connected blocks, reduce
// each block (dominated vertices, seeded-wedge rewrite), then hand each
// reduced block to the first detector that claims it; exact search is the
// loudly-traced last resort. The result is optimal whenever every engaged
// solver is, which the trace lets the caller audit.
inline SolveReport dispatch_solve(const Graph& g, const TerminalSet& t,
                                  const SolveOptions& opt = {}) {
    auto start = std::chrono::steady_clock::now();
    if (!t.empty() && t.max_vertex() >= g.vertex_count())
        throw std::invalid_argument("dispatch_solve: terminal outside the graph");

    SolveReport rep;
    auto stamp = [&]() {
        rep.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    };

    Schools sc = schools(t, g.vertex_count());
    {
        TraceEntry e;
        e.step = "schools";
        e.note = "q=" + std::to_string(sc.count());
        rep.trace.push_back(std::move(e));
    }
    if (t.empty()) {
        stamp();
        return rep;
    }

    auto comps = connected_components(g);
    std::vector<int> comp_of(g.vertex_count(), -1);
    for (int i = 0; i < static_cast<int>(comps.size()); ++i)
        for (int v : comps[i]) comp_of[v] = i;
    for (auto [s, u] : t.pairs())
        if (comp_of[s] != comp_of[u])
            throw InfeasibleError("terminal pair split across components");

    std::vector<Edge> all_edges;
    for (const auto& comp : comps) {
        Subgraph csub = induced_subgraph(g, comp);
        TerminalSet ct = t.restrict_to(csub);
        if (ct.empty()) continue;
        {
            TraceEntry e;
            e.step = "component";
            e.note = detail::instance_note(csub.graph, ct);
            rep.trace.push_back(std::move(e));
        }
        for (const auto& inst : split_blocks(csub.graph, ct)) {
            if (inst.terminals.empty()) continue;
            {
                TraceEntry e;
                e.step = "block";
                e.note = detail::instance_note(inst.sub.graph, inst.terminals);
                rep.trace.push_back(std::move(e));
            }
            DominationReduction dom = remove_dominated(inst.sub.graph, inst.terminals);
            if (!dom.removed.empty()) {
                TraceEntry e;
                e.step = "remove-dominated";
                e.note = "removed " + std::to_string(dom.removed.size());
                rep.trace.push_back(std::move(e));
            }
            WedgeTransformResult wt = wedge_transform(dom.sub.graph, dom.terminals);
            if (!wt.deleted.empty()) {
                TraceEntry e;
                e.step = "wedge-transform";
                e.note = "deleted " + std::to_string(wt.deleted.size()) + " edges";
                rep.trace.push_back(std::move(e));
            }
            SteinerForest f =
                detail::solve_reduced(wt.graph, dom.terminals, opt, rep.trace);
            // Un-apply the relabellings: transform edges live in reduced ids.
            for (Edge e : dom.sub.lift(f.edges))
                all_edges.push_back(csub.lift(inst.sub.lift(e)));
        }
    }

    std::sort(all_edges.begin(), all_edges.end());
    all_edges.erase(std::unique(all_edges.begin(), all_edges.end()), all_edges.end());
    if (!is_valid_forest(g, t, all_edges))
        throw std::logic_error("dispatch_solve: assembled edges are not a valid forest");
    rep.size = static_cast<int>(all_edges.size());
    rep.edges = std::move(all_edges);
    stamp();
    return rep;
}

// Re-run the sub-solve a trace entry recorded; analysis entries return
// nothing. The per-entry sizes sum to the report's size, because blocks
// partition the demand and their edge sets are disjoint.
inline std::optional<int> replay_trace_entry(const TraceEntry& e,
                                             const SolveOptions& opt = {}) {
    if (e.size < 0) return std::nullopt;
    SolveOptions forced = opt;
    if (e.step == "tw2") forced.method = SolveMethod::Tw2;
    else if (e.step == "tangle") forced.method = SolveMethod::Tangle;
    else if (e.step == "cycle-bush") forced.method = SolveMethod::Cycle;
    else if (e.step == "path-bush") forced.method = SolveMethod::Path;
    else if (e.step == "exact" || e.step == "ExponentialFallback")
        forced.method = SolveMethod::Exact;
    else throw std::invalid_argument("replay_trace_entry: unknown step " + e.step);
    std::vector<TraceEntry> scratch;
    return detail::solve_reduced(e.graph, e.terminals, forced, scratch).size();
}

inline int replay_trace(const SolveReport& r, const SolveOptions& opt = {}) {
    int total = 0;
    for (const auto& e : r.trace)
        if (auto s = replay_trace_entry(e, opt)) total += *s;
    return total;
}

// Which detectors claim the graph as a whole, for the structure probe.
struct DetectReport {
    bool tw2 = false;
    int longest_path = 0;
    std::optional<int> tangle_stems;    // stem count when the bush is accepted
    std::optional<int> cycle_stems;
    std::optional<int> path_citruses;
};

inline DetectReport probe(const Graph& g, const SolveOptions& opt = {}) {
    DetectReport r;
    r.tw2 = treewidth_at_most_2(g);
    std::vector<int> p = longest_path(g).vertices;
    r.longest_path = static_cast<int>(p.size());
    if (r.longest_path <= opt.stem_bound)
        if (auto bush = try_entangled_stems(g, p, opt.wedge_budget))
            r.tangle_stems = static_cast<int>(bush->stems.size());
    try {
        if (auto bush = detect_cycle_bush(g, opt.wedge_budget))
            r.cycle_stems = static_cast<int>(bush->stems.size());
    } catch (const TooLargeError&) {
    }
    if (auto bush = detect_path_bush(g, opt.wedge_budget))
        r.path_citruses = static_cast<int>(bush->flower_edges.size());
    return r;
}

}  // namespace steiner
