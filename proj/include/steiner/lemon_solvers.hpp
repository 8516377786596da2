#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "citrus.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "oracle.hpp"
#include "reductions.hpp"
#include "sp_solver.hpp"
#include "terminals.hpp"

namespace steiner {

// How a citrus solution may interact with the outside world through its ends:
// Identified assumes the ends are already connected externally (the returned
// forest never links them), Intertwined must link them itself, Free takes
// whichever of the two is cheaper.
enum class CitrusSolveMode { Identified, Intertwined, Free };

namespace detail {

// Push a citrus through a vertex relabelling. Classes are carried over, so
// the map must be an isomorphism onto its image as far as the citrus extends.
inline Citrus relabel_citrus(const Citrus& c, const std::vector<int>& new_id) {
    Citrus out;
    out.x = std::min(new_id[c.x], new_id[c.y]);
    out.y = std::max(new_id[c.x], new_id[c.y]);
    out.direct_edge = c.direct_edge;
    for (const auto& w : c.wedges) {
        Wedge nw;
        nw.x = out.x;
        nw.y = out.y;
        nw.cls = w.cls;
        nw.interior.reserve(w.interior.size());
        for (int v : w.interior) nw.interior.push_back(new_id[v]);
        std::sort(nw.interior.begin(), nw.interior.end());
        out.wedges.push_back(std::move(nw));
    }
    return out;
}

// One wedge instance in isolation. Juicy closures are series-parallel and any
// subgraph of them stays that way; the rest are small enough to brute.
inline SteinerForest solve_wedge_local(const Graph& g, const TerminalSet& t,
                                       bool juicy) {
    return juicy ? solve_tw2(g, t) : solve_exact(g, t);
}

// Ends considered pre-connected: merge them into one hub and solve each wedge
// against the hub on its own. A forest in the merged graph never lifts to an
// x..y path, so the union below stays acyclic in g.
inline std::vector<Edge> citrus_identified(const Graph& g, const Citrus& c,
                                           const TerminalSet& t) {
    Identification ident = identify_set(g, {c.x, c.y});
    int d = ident.merged;
    TerminalSet td = t.relabel(ident.vertex_map);

    std::vector<int> wedge_of(ident.graph.vertex_count(), -1);
    for (int i = 0; i < static_cast<int>(c.wedges.size()); ++i)
        for (int v : c.wedges[i].interior) wedge_of[ident.vertex_map[v]] = i;

    // Pairs spanning two wedges must route through the hub; split them there.
    std::vector<Edge> ps;
    for (auto [s, u] : td.pairs()) {
        if (s != d && u != d && wedge_of[s] != wedge_of[u]) {
            ps.push_back(make_edge(s, d));
            ps.push_back(make_edge(u, d));
        } else {
            ps.push_back(make_edge(s, u));
        }
    }
    TerminalSet ts{std::move(ps)};

    std::vector<Edge> out;
    for (int i = 0; i < static_cast<int>(c.wedges.size()); ++i) {
        std::vector<int> keep{d};
        for (int v : c.wedges[i].interior) keep.push_back(ident.vertex_map[v]);
        Subgraph sub = induced_subgraph(ident.graph, keep);
        TerminalSet tl = ts.restrict_to(sub);
        if (tl.empty()) continue;
        SteinerForest f =
            solve_wedge_local(sub.graph, tl, c.wedges[i].cls == WedgeClass::Juicy);
        for (auto e : sub.lift(f.edges)) out.push_back(ident.lift(e));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// The solution must link x to y inside the citrus. The link runs through one
// wedge closure (or the direct edge, which every closure contains), so branch
// on the carrier wedge and solve everything else with the ends identified.
inline std::vector<Edge> citrus_intertwined(const Graph& g, const Citrus& c,
                                            const TerminalSet& t) {
    if (c.wedges.empty()) {
        if (!c.direct_edge) throw InfeasibleError("no route between citrus ends");
        return {make_edge(c.x, c.y)};
    }

    std::vector<int> wedge_of(g.vertex_count(), -1);
    for (int i = 0; i < static_cast<int>(c.wedges.size()); ++i)
        for (int v : c.wedges[i].interior) wedge_of[v] = i;

    // Cross-wedge pairs route through an end; splitting them at x is lossless
    // because every branch links x to y anyway.
    std::vector<Edge> ps;
    for (auto [s, u] : t.pairs()) {
        bool si = s != c.x && s != c.y, ui = u != c.x && u != c.y;
        if (si && ui && wedge_of[s] != wedge_of[u]) {
            ps.push_back(make_edge(s, c.x));
            ps.push_back(make_edge(u, c.x));
        } else {
            ps.push_back(make_edge(s, u));
        }
    }
    TerminalSet ts{std::move(ps)};

    std::optional<std::vector<Edge>> best;
    for (int i = 0; i < static_cast<int>(c.wedges.size()); ++i) {
        const Wedge& w = c.wedges[i];
        std::vector<char> in_l(g.vertex_count(), 0);
        for (int v : w.interior) in_l[v] = 1;
        in_l[c.x] = in_l[c.y] = 1;

        std::vector<Edge> inside{make_edge(c.x, c.y)}, rest;
        for (auto [s, u] : ts.pairs())
            (in_l[s] && in_l[u] ? inside : rest).push_back(make_edge(s, u));

        // Carrier: the closed wedge, direct edge included if present.
        Subgraph car = induced_subgraph(g, w.vertices());
        std::vector<Edge> insl;
        for (auto [s, u] : inside)
            insl.push_back(make_edge(car.new_id[s], car.new_id[u]));
        SteinerForest fin = solve_wedge_local(car.graph, TerminalSet{std::move(insl)},
                                              w.cls == WedgeClass::Juicy);

        std::vector<Edge> cand = car.lift(fin.edges);

        if (!rest.empty()) {
            Subgraph rsub = remove_vertices(g, w.interior);
            Citrus rc;
            rc.x = std::min(rsub.new_id[c.x], rsub.new_id[c.y]);
            rc.y = std::max(rsub.new_id[c.x], rsub.new_id[c.y]);
            rc.direct_edge = c.direct_edge;
            for (int j = 0; j < static_cast<int>(c.wedges.size()); ++j) {
                if (j == i) continue;
                Wedge nw;
                nw.x = rc.x;
                nw.y = rc.y;
                nw.cls = c.wedges[j].cls;
                for (int v : c.wedges[j].interior)
                    nw.interior.push_back(rsub.new_id[v]);
                std::sort(nw.interior.begin(), nw.interior.end());
                rc.wedges.push_back(std::move(nw));
            }
            std::vector<Edge> restl;
            for (auto [s, u] : rest)
                restl.push_back(make_edge(rsub.new_id[s], rsub.new_id[u]));
            auto fr = citrus_identified(rsub.graph, rc, TerminalSet{std::move(restl)});
            for (auto e : fr) cand.push_back(rsub.lift(e));
        }

        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        if (!best || forest_less(cand, *best)) best = std::move(cand);
    }
    return *best;
}

// Unconstrained optimum over the whole citrus. Either the ends end up linked
// inside (handled above), or no tree holds both ends; for the latter, clean
// out seeded signatures first, then classify each pulped-interior vertex as
// reaching x, reaching y, or neither, and solve the series-parallel remainder.
inline std::vector<Edge> citrus_free(const Graph& g, const Citrus& c,
                                     const TerminalSet& t) {
    std::optional<std::vector<Edge>> best;
    try {
        best = citrus_intertwined(g, c, t);
    } catch (const InfeasibleError&) {
    }

    // The transform may split wedges or drop a direct edge, but every surviving
    // component off the ends still attaches to both, so the citrus re-forms.
    WedgeTransformResult wt = wedge_transform(g, t);
    Citrus c1 = make_citrus(wt.graph, c.x, c.y);

    std::vector<int> cset;
    for (const auto& w : c1.wedges)
        if (w.cls == WedgeClass::Pulped)
            cset.insert(cset.end(), w.interior.begin(), w.interior.end());
    std::sort(cset.begin(), cset.end());

    int n = g.vertex_count();
    std::vector<int> cls(n, -1);
    long long total = 1;
    for (size_t i = 0; i < cset.size(); ++i) total *= 3;

    for (long long code = 0; code < total; ++code) {
        // Most significant digit goes to the smallest vertex.
        long long r = code;
        for (size_t i = cset.size(); i-- > 0;) {
            cls[cset[i]] = static_cast<int>(r % 3);
            r /= 3;
        }

        std::vector<int> xs{c.x}, ys{c.y};
        for (int v : cset) {
            if (cls[v] == 0) xs.push_back(v);
            else if (cls[v] == 1) ys.push_back(v);
        }
        Subgraph xg = induced_subgraph(wt.graph, xs);
        Subgraph yg = induced_subgraph(wt.graph, ys);
        if (!is_connected(xg.graph) || !is_connected(yg.graph)) continue;

        // Demands that this classification can never satisfy.
        bool ok = true;
        std::vector<Edge> tp, tz;
        for (auto [s, u] : t.pairs()) {
            int a = s < n ? cls[s] : -1, b = u < n ? cls[u] : -1;
            if ((a == 0 && b >= 0 && b != 0) || (b == 0 && a >= 0 && a != 0) ||
                (a == 1 && b >= 0 && b != 1) || (b == 1 && a >= 0 && a != 1) ||
                ((a == 2) != (b == 2))) {
                ok = false;
                break;
            }
            (a == 2 ? tz : tp).push_back(make_edge(s, u));
        }
        if (!ok) continue;

        // Keep the untouched part of the transformed graph, and collapse each
        // end's class to a spanning tree so the whole thing stays tw <= 2.
        std::vector<Edge> ges;
        for (auto [u, v] : wt.graph.edges())
            if (cls[u] < 0 && cls[v] < 0) ges.push_back(make_edge(u, v));
        for (auto e : spanning_forest(n, xg.lift(xg.graph.edges())))
            ges.push_back(e);
        for (auto e : spanning_forest(n, yg.lift(yg.graph.edges())))
            ges.push_back(e);
        Graph gp(n, std::move(ges));

        std::vector<Edge> branch;
        try {
            SteinerForest f = solve_tw2(gp, TerminalSet{std::move(tp)});
            branch = f.edges;
        } catch (const InfeasibleError&) {
            continue;
        }

        // Neither-class demands must sit inside one piece of one pulped
        // interior; solve those pieces by brute force.
        TerminalSet tzs{std::move(tz)};
        bool zok = true;
        for (const auto& w : c1.wedges) {
            if (w.cls != WedgeClass::Pulped) continue;
            std::vector<int> zs;
            for (int v : w.interior)
                if (cls[v] == 2) zs.push_back(v);
            if (zs.empty()) continue;
            Subgraph zg = induced_subgraph(wt.graph, zs);
            for (const auto& comp : connected_components(zg.graph)) {
                std::vector<char> in_d(n, 0);
                for (int lv : comp) in_d[zg.vertices[lv]] = 1;
                std::vector<Edge> local;
                for (auto [s, u] : tzs.pairs()) {
                    if (in_d[s] != in_d[u]) { zok = false; break; }
                    if (in_d[s]) local.push_back(make_edge(s, u));
                }
                if (!zok) break;
                if (local.empty()) continue;
                std::vector<int> dverts;
                for (int lv : comp) dverts.push_back(zg.vertices[lv]);
                Subgraph dsub = induced_subgraph(wt.graph, dverts);
                std::vector<Edge> locl;
                for (auto [s, u] : local)
                    locl.push_back(make_edge(dsub.new_id[s], dsub.new_id[u]));
                SteinerForest df = solve_exact(dsub.graph, TerminalSet{std::move(locl)});
                for (auto e : dsub.lift(df.edges)) branch.push_back(e);
            }
            if (!zok) break;
        }
        if (!zok) continue;

        std::sort(branch.begin(), branch.end());
        branch.erase(std::unique(branch.begin(), branch.end()), branch.end());
        if (!is_valid_forest(g, t, branch)) continue;
        if (!best || forest_less(branch, *best)) best = std::move(branch);
    }

    if (!best) throw InfeasibleError("no feasible forest for the citrus");
    return *best;
}

}  // namespace detail

// Solve one citrus that spans its graph, in the given mode. The relaxed
// pulped bound variant exists for the merged instances the cycle solver
// builds; everyone else wants the plain one.
inline SteinerForest solve_citrus(const Graph& g, const Citrus& c,
                                  const TerminalSet& t, CitrusSolveMode mode,
                                  int ell, int pulped_bound) {
    if (!is_lemon(c, ell, pulped_bound))
        throw NotALemonError("citrus exceeds the wedge budget");
    std::vector<int> ves = c.vesicle();
    if (static_cast<int>(ves.size()) != g.vertex_count())
        throw std::invalid_argument("solve_citrus: vesicle does not span the graph");
    for (int i = 0; i < static_cast<int>(ves.size()); ++i)
        if (ves[i] != i)
            throw std::invalid_argument("solve_citrus: vesicle does not span the graph");

    std::vector<Edge> out;
    switch (mode) {
        case CitrusSolveMode::Identified:
            out = detail::citrus_identified(g, c, t);
            break;
        case CitrusSolveMode::Intertwined:
            out = detail::citrus_intertwined(g, c, t);
            break;
        case CitrusSolveMode::Free:
            out = detail::citrus_free(g, c, t);
            break;
    }
    return SteinerForest{std::move(out)};
}

inline SteinerForest solve_citrus(const Graph& g, const Citrus& c,
                                  const TerminalSet& t, CitrusSolveMode mode,
                                  int ell) {
    return solve_citrus(g, c, t, mode, ell, ell);
}

// Bushes whose transform lands in the series-parallel world need none of the
// citrus machinery.
inline SteinerForest solve_bush_tw2(const Graph& g, const BushDecomposition& bush,
                                    const TerminalSet& t) {
    (void)bush;
    WedgeTransformResult wt = wedge_transform(g, t);
    if (!treewidth_at_most_2(wt.graph))
        throw NotTw2AfterTransformError("graph stays dense after the transform");
    return solve_tw2(wt.graph, t);
}

// Path bush: every 2-connected block is one citrus, blocks meet only in
// stems, so blocks solve independently in free mode. Prefer the citrus
// recorded in the decomposition over a fresh search: the lexicographically
// first end pair of a block need not be the one with small pulped wedges.
inline SteinerForest solve_path_bush(const Graph& g, const BushDecomposition& bush,
                                     const TerminalSet& t, int ell) {
    std::map<std::vector<int>, const Citrus*> by_vesicle;
    for (const auto& [e, c] : bush.citrus) by_vesicle[c.vesicle()] = &c;

    std::vector<Edge> out;
    for (const auto& inst : split_blocks(g, t)) {
        if (inst.terminals.empty()) continue;
        Citrus local;
        auto it = by_vesicle.find(inst.sub.vertices);
        if (it != by_vesicle.end()) {
            local = detail::relabel_citrus(*it->second, inst.sub.new_id);
        } else {
            auto found = find_citrus(inst.sub.graph);
            if (!found) throw NotALemonError("block is not a citrus");
            local = *found;
        }
        SteinerForest f = solve_citrus(inst.sub.graph, local, inst.terminals,
                                       CitrusSolveMode::Free, ell);
        for (auto e : inst.sub.lift(f.edges)) out.push_back(e);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return SteinerForest{std::move(out)};
}

// Which branch of the cycle solver produced the winning forest, and which
// flower edges were guessed. Ties keep the earliest case.
struct CycleBushTrace {
    int winning_case = 0;
    Edge guess1{-1, -1}, guess2{-1, -1};
};

// Cycle bush: the flower is a single cycle of citruses. A forest cannot keep
// every citrus internally linked, so branch on where the ring breaks:
//   1. some citrus has its stems linked only around the far side;
//   2. exactly two citruses are broken outright, both arcs between them hold;
//   3. two breaks are cyclically consecutive with a third somewhere beyond.
inline SteinerForest solve_cycle_bush(const Graph& g, const BushDecomposition& bush,
                                      const TerminalSet& t, int ell,
                                      CycleBushTrace* trace = nullptr) {
    if (trace) *trace = CycleBushTrace{};
    if (t.empty()) return SteinerForest{};
    int m = static_cast<int>(bush.stems.size());
    if (m < 3)
        throw std::invalid_argument("solve_cycle_bush: need at least three stems");

    auto stem = [&](int p) { return bush.stems[((p % m) + m) % m]; };
    auto flower = [&](int p) { return make_edge(stem(p), stem(p + 1)); };
    std::vector<const Citrus*> lemon(m);
    for (int p = 0; p < m; ++p) lemon[p] = &bush.citrus.at(flower(p));

    int n = g.vertex_count();
    std::vector<std::vector<int>> interior(m);
    std::vector<int> pos_of(n, -1), stem_pos(n, -1);
    for (int p = 0; p < m; ++p) stem_pos[stem(p)] = p;
    for (int p = 0; p < m; ++p) {
        for (const auto& w : lemon[p]->wedges)
            for (int v : w.interior) {
                interior[p].push_back(v);
                pos_of[v] = p;
            }
        std::sort(interior[p].begin(), interior[p].end());
    }
    for (int v = 0; v < n; ++v)
        if (pos_of[v] < 0 && stem_pos[v] < 0)
            throw std::invalid_argument("solve_cycle_bush: vertex outside all citrus");

    std::optional<std::vector<Edge>> best;
    int best_case = 0;
    Edge best_g1{-1, -1}, best_g2{-1, -1};
    // Prune first: sub-solutions are forests individually but their union may
    // close a ring; dropping cycle edges keeps feasibility and only shrinks.
    auto offer = [&](std::vector<Edge> es, int which, Edge g1, Edge g2) {
        es = spanning_forest(n, std::move(es));
        std::sort(es.begin(), es.end());
        if (!is_valid_forest(g, t, es)) return;
        if (!best || forest_less(es, *best)) {
            best = std::move(es);
            best_case = which;
            best_g1 = g1;
            best_g2 = g2;
        }
    };

    // Path bush over stems first..first+count with the given demands (parent
    // ids). drop removes one stray edge, used when the guessed citrus's direct
    // edge would close the arc back into a ring.
    auto solve_arc = [&](int first, int count, const std::vector<Edge>& pairs,
                         std::optional<Edge> drop) -> std::vector<Edge> {
        if (count <= 0) return {};
        std::vector<int> keep;
        for (int q = 0; q <= count; ++q) keep.push_back(stem(first + q));
        for (int q = 0; q < count; ++q) {
            int p = ((first + q) % m + m) % m;
            keep.insert(keep.end(), interior[p].begin(), interior[p].end());
        }
        Subgraph sub = induced_subgraph(g, keep);
        Graph arc_graph = sub.graph;
        if (drop) {
            int du = sub.new_id[drop->first], dv = sub.new_id[drop->second];
            if (du >= 0 && dv >= 0 && arc_graph.has_edge(du, dv)) {
                std::vector<Edge> fes;
                for (auto e : arc_graph.edges())
                    if (e != make_edge(du, dv)) fes.push_back(e);
                arc_graph = Graph(arc_graph.vertex_count(), std::move(fes));
            }
        }
        BushDecomposition ab;
        for (int q = 0; q <= count; ++q)
            ab.stems.push_back(sub.new_id[stem(first + q)]);
        for (int q = 0; q < count; ++q) {
            int p = ((first + q) % m + m) % m;
            Edge key = make_edge(sub.new_id[stem(first + q)],
                                 sub.new_id[stem(first + q + 1)]);
            ab.flower_edges.push_back(key);
            ab.citrus[key] = detail::relabel_citrus(*lemon[p], sub.new_id);
        }
        std::vector<Edge> ap;
        for (auto [s, u] : pairs) {
            int ls = sub.new_id[s], lu = sub.new_id[u];
            if (ls < 0 || lu < 0)
                throw std::invalid_argument("solve_cycle_bush: demand off its arc");
            if (ls != lu) ap.push_back(make_edge(ls, lu));
        }
        SteinerForest f =
            solve_path_bush(arc_graph, ab, TerminalSet{std::move(ap)}, ell);
        std::vector<Edge> lifted;
        for (auto e : f.edges) lifted.push_back(sub.lift(e));
        return lifted;
    };

    // Case 1: citrus i's stems are linked around the far side, so solve it
    // with its ends identified and make the remaining path provide the link.
    for (int i = 0; i < m; ++i) {
        const Citrus& ci = *lemon[i];
        int cx = ci.x, cy = ci.y;
        std::vector<char> in_ves(n, 0);
        for (int v : ci.vesicle()) in_ves[v] = 1;

        std::vector<Edge> tin, tre;
        for (auto [s, u] : t.pairs()) {
            bool si = in_ves[s], ui = in_ves[u];
            if (si && ui) {
                tin.push_back(make_edge(s, u));
            } else if (!si && !ui) {
                tre.push_back(make_edge(s, u));
            } else {
                int ins = si ? s : u, outs = si ? u : s;
                if (ins != cx) tin.push_back(make_edge(ins, cx));
                tre.push_back(make_edge(outs, cx));
            }
        }
        tre.push_back(make_edge(cx, cy));

        Subgraph vsub = induced_subgraph(g, ci.vesicle());
        Citrus lc = detail::relabel_citrus(ci, vsub.new_id);
        std::vector<Edge> tinl;
        for (auto [s, u] : tin)
            tinl.push_back(make_edge(vsub.new_id[s], vsub.new_id[u]));
        SteinerForest fin = solve_citrus(vsub.graph, lc, TerminalSet{std::move(tinl)},
                                         CitrusSolveMode::Identified, ell);
        std::vector<Edge> cand = vsub.lift(fin.edges);
        auto rest = solve_arc(i + 1, m - 1, tre, make_edge(cx, cy));
        cand.insert(cand.end(), rest.begin(), rest.end());
        offer(std::move(cand), 1, flower(i), Edge{-1, -1});
    }

    // Shared by cases 2 and 3: the union of the two guessed vesicles, with
    // stray stem-stem edges of neighbouring citruses removed.
    auto guessed_pair_subgraph = [&](int x1, int y1, int x2, int y2, int i, int j,
                                     Subgraph& msub) -> Graph {
        std::vector<int> keep = lemon[i]->vesicle();
        auto v2 = lemon[j]->vesicle();
        keep.insert(keep.end(), v2.begin(), v2.end());
        std::sort(keep.begin(), keep.end());
        keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
        msub = induced_subgraph(g, keep);
        auto special = [&](int gv) {
            return gv == x1 || gv == y1 || gv == x2 || gv == y2;
        };
        std::vector<Edge> mes;
        for (auto e : msub.graph.edges()) {
            int gu = msub.vertices[e.first], gv = msub.vertices[e.second];
            if (special(gu) && special(gv)) {
                Edge ge = make_edge(gu, gv);
                if (ge != make_edge(x1, y1) && ge != make_edge(x2, y2)) continue;
            }
            mes.push_back(e);
        }
        return Graph(msub.graph.vertex_count(), std::move(mes));
    };

    // Case 2: citruses i and j are both broken, both arcs between them hold.
    // Gluing y1 to x2 and y2 to x1 folds the two citruses into one super
    // citrus between the two glue points; the arcs then realise the glue.
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            int ja = ((j - i) % m + m) % m;
            int lenA = ja - 1, lenR = m - ja - 1;
            int x1 = stem(i), y1 = stem(i + 1), x2 = stem(j), y2 = stem(j + 1);

            auto side_of = [&](int v) -> int {
                if (pos_of[v] >= 0) {
                    int rel = ((pos_of[v] - i) % m + m) % m;
                    if (rel == 0) return 2;
                    if (rel == ja) return 3;
                    return rel < ja ? 0 : 1;
                }
                int rel = ((stem_pos[v] - i) % m + m) % m;
                return (rel >= 1 && rel <= ja) ? 0 : 1;
            };

            bool ok = true;
            std::vector<Edge> tm, ta, tb;
            for (auto [s0, u0] : t.pairs()) {
                int s = s0, u = u0;
                int a = side_of(s), b = side_of(u);
                if (a < 2 && b >= 2) {
                    std::swap(s, u);
                    std::swap(a, b);
                }
                if (a >= 2 && b >= 2) {
                    tm.push_back(make_edge(s, u));
                } else if (a >= 2 && b == 0) {
                    tm.push_back(make_edge(s, y1));
                    int exit = a == 2 ? y1 : x2;
                    if (u != exit) ta.push_back(make_edge(u, exit));
                } else if (a >= 2 && b == 1) {
                    tm.push_back(make_edge(s, y2));
                    int exit = a == 2 ? x1 : y2;
                    if (u != exit) tb.push_back(make_edge(u, exit));
                } else if (a == 0 && b == 0) {
                    ta.push_back(make_edge(s, u));
                } else if (a == 1 && b == 1) {
                    tb.push_back(make_edge(s, u));
                } else {
                    ok = false;  // one endpoint per arc: impossible here
                    break;
                }
            }
            if (!ok) continue;
            if (lenA > 0) ta.push_back(make_edge(y1, x2));
            if (lenR > 0) tb.push_back(make_edge(y2, x1));

            Subgraph msub;
            Graph mg = guessed_pair_subgraph(x1, y1, x2, y2, i, j, msub);

            Graph cur = mg;
            std::vector<int> cmap(mg.vertex_count());
            std::iota(cmap.begin(), cmap.end(), 0);
            std::vector<Identification> layers;
            auto merge_pair = [&](int ga, int gb) {
                int la = cmap[msub.new_id[ga]], lb = cmap[msub.new_id[gb]];
                if (la == lb) return;
                Identification id = identify_set(cur, {la, lb});
                for (int& v : cmap) v = id.vertex_map[v];
                cur = id.graph;
                layers.push_back(std::move(id));
            };
            merge_pair(y1, x2);
            merge_pair(y2, x1);
            int d1 = cmap[msub.new_id[y1]], d2 = cmap[msub.new_id[y2]];

            std::vector<int> comp(n, -1);
            for (int v = 0; v < n; ++v)
                if (msub.new_id[v] >= 0) comp[v] = cmap[msub.new_id[v]];

            Citrus mc;
            mc.x = std::min(d1, d2);
            mc.y = std::max(d1, d2);
            mc.direct_edge = cur.has_edge(d1, d2);
            for (const Citrus* src : {lemon[i], lemon[j]})
                for (const auto& w : src->wedges) {
                    Wedge nw;
                    nw.x = mc.x;
                    nw.y = mc.y;
                    nw.cls = w.cls;
                    for (int v : w.interior) nw.interior.push_back(comp[v]);
                    std::sort(nw.interior.begin(), nw.interior.end());
                    mc.wedges.push_back(std::move(nw));
                }

            std::vector<Edge> tml;
            for (auto [s, u] : tm) {
                int ls = comp[s], lu = comp[u];
                if (ls != lu) tml.push_back(make_edge(ls, lu));
            }
            SteinerForest fm = solve_citrus(cur, mc, TerminalSet{std::move(tml)},
                                            CitrusSolveMode::Free, ell, 2 * ell);

            std::vector<Edge> fed = fm.edges;
            for (auto it = layers.rbegin(); it != layers.rend(); ++it)
                fed = it->lift(fed);
            std::vector<Edge> cand;
            for (auto e : fed) cand.push_back(msub.lift(e));

            if (lenA > 0) {
                auto ra = solve_arc(i + 1, lenA, ta, std::nullopt);
                cand.insert(cand.end(), ra.begin(), ra.end());
            }
            if (lenR > 0) {
                auto rb = solve_arc(j + 1, lenR, tb, std::nullopt);
                cand.insert(cand.end(), rb.begin(), rb.end());
            }
            offer(std::move(cand), 2, flower(i), flower(j));
        }
    }

    // Case 3: breaks at i and j are consecutive, a third lies beyond j, so
    // only the near arc holds. Glue y1 to x2 once: the two citruses become a
    // two-citrus path bush hanging off the glue point.
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            int ja = ((j - i) % m + m) % m;
            int lenA = ja - 1, lenR = m - ja - 1;
            if (lenR == 0) continue;  // a further break needs room on the far arc
            int x1 = stem(i), y1 = stem(i + 1), x2 = stem(j), y2 = stem(j + 1);

            auto side_of = [&](int v) -> int {
                if (pos_of[v] >= 0) {
                    int rel = ((pos_of[v] - i) % m + m) % m;
                    if (rel == 0) return 2;
                    if (rel == ja) return 3;
                    return rel < ja ? 0 : 1;
                }
                int rel = ((stem_pos[v] - i) % m + m) % m;
                return (rel >= 1 && rel <= ja) ? 0 : 1;
            };

            bool ok = true;
            std::vector<Edge> tb3, ta3, tc3;
            for (auto [s0, u0] : t.pairs()) {
                int s = s0, u = u0;
                int a = side_of(s), b = side_of(u);
                if (a < 2 && b >= 2) {
                    std::swap(s, u);
                    std::swap(a, b);
                }
                if (a >= 2 && b >= 2) {
                    tb3.push_back(make_edge(s, u));
                } else if (a >= 2 && b == 0) {
                    if (s != y1) tb3.push_back(make_edge(s, y1));
                    int exit = a == 2 ? y1 : x2;
                    if (u != exit) ta3.push_back(make_edge(u, exit));
                } else if (a >= 2 && b == 1) {
                    int exit = a == 2 ? x1 : y2;
                    if (s != exit) tb3.push_back(make_edge(s, exit));
                    if (u != exit) tc3.push_back(make_edge(u, exit));
                } else if (a == 0 && b == 0) {
                    ta3.push_back(make_edge(s, u));
                } else if (a == 1 && b == 1) {
                    tc3.push_back(make_edge(s, u));
                } else {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            if (lenA > 0) ta3.push_back(make_edge(y1, x2));

            Subgraph bsub;
            Graph bg = guessed_pair_subgraph(x1, y1, x2, y2, i, j, bsub);

            Graph curb = bg;
            std::vector<int> bmap(bg.vertex_count());
            std::iota(bmap.begin(), bmap.end(), 0);
            std::optional<Identification> glue;
            if (y1 != x2) {
                glue = identify_set(bg, {bsub.new_id[y1], bsub.new_id[x2]});
                for (int& v : bmap) v = glue->vertex_map[v];
                curb = glue->graph;
            }
            std::vector<int> comp(n, -1);
            for (int v = 0; v < n; ++v)
                if (bsub.new_id[v] >= 0) comp[v] = bmap[bsub.new_id[v]];
            int hub = comp[y1], lx1 = comp[x1], ly2 = comp[y2];

            BushDecomposition bb;
            bb.stems = {lx1, hub, ly2};
            Edge key1 = make_edge(lx1, hub), key2 = make_edge(hub, ly2);
            bb.flower_edges = {key1, key2};
            bb.citrus[key1] = detail::relabel_citrus(*lemon[i], comp);
            bb.citrus[key2] = detail::relabel_citrus(*lemon[j], comp);

            std::vector<Edge> tbl;
            for (auto [s, u] : tb3) {
                int ls = comp[s], lu = comp[u];
                if (ls != lu) tbl.push_back(make_edge(ls, lu));
            }
            SteinerForest fb =
                solve_path_bush(curb, bb, TerminalSet{std::move(tbl)}, ell);

            std::vector<Edge> fed = fb.edges;
            if (glue) fed = glue->lift(fed);
            std::vector<Edge> cand;
            for (auto e : fed) cand.push_back(bsub.lift(e));

            if (lenA > 0) {
                auto ra = solve_arc(i + 1, lenA, ta3, std::nullopt);
                cand.insert(cand.end(), ra.begin(), ra.end());
            }
            if (!tc3.empty()) {
                auto rc = solve_arc(j + 1, lenR, tc3, std::nullopt);
                cand.insert(cand.end(), rc.begin(), rc.end());
            }
            offer(std::move(cand), 3, flower(i), flower(j));
        }
    }

    if (!best) throw InfeasibleError("no feasible forest for the cycle bush");
    if (trace) {
        trace->winning_case = best_case;
        trace->guess1 = best_g1;
        trace->guess2 = best_g2;
    }
    return SteinerForest{std::move(*best)};
}

}  // namespace steiner
