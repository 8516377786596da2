#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "citrus.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "lemon_solvers.hpp"
#include "terminals.hpp"

namespace steiner {

// A pattern fixes the coarse shape of a solution across an entangled bush:
// which tangle vertices take part and through which of their stem edges, and
// which stem pairs are linked through their own citrus. Patterns are forests
// over the stems plus the participating tangle vertices; a participating
// tangle vertex keeps degree at least two, because a single attachment never
// needs to be guessed up front.
struct Pattern {
    std::vector<int> tangle;         // participating tangle vertices, sorted
    std::vector<Edge> tangle_edges;  // kept tangle-stem edges
    std::vector<Edge> stem_edges;    // stem pairs whose citrus links its ends

    bool operator==(const Pattern& other) const = default;
};

// Every forest whose edges are flower edges or tangle-stem edges of g, with
// all stems present (isolated ones included) and every used tangle vertex of
// degree at least two. The degree constraint caps the tangle share of any
// pattern at |X| - 1 vertices, so the list stays polynomial for fixed |X|.
inline std::vector<Pattern> enumerate_patterns(std::vector<int> X, std::vector<int> Y,
                                               std::vector<Edge> flower_edges,
                                               const Graph& g) {
    std::sort(X.begin(), X.end());
    std::sort(Y.begin(), Y.end());
    std::sort(flower_edges.begin(), flower_edges.end());
    flower_edges.erase(std::unique(flower_edges.begin(), flower_edges.end()),
                       flower_edges.end());

    std::map<int, int> slot;
    for (size_t i = 0; i < X.size(); ++i) slot[X[i]] = static_cast<int>(i);

    std::vector<std::vector<int>> ynb(Y.size());
    for (size_t j = 0; j < Y.size(); ++j) {
        for (int w : g.neighbors(Y[j]))
            if (slot.count(w)) ynb[j].push_back(w);
        std::sort(ynb[j].begin(), ynb[j].end());
    }

    auto find = [](std::vector<int>& p, int v) {
        while (p[v] != v) v = p[v] = p[p[v]];
        return v;
    };

    std::vector<Pattern> out;
    Pattern cur;
    std::function<void(size_t, std::vector<int>)> pick_tangle =
        [&](size_t j, std::vector<int> par) {
            if (j == Y.size()) {
                Pattern p = cur;
                std::sort(p.tangle_edges.begin(), p.tangle_edges.end());
                std::sort(p.stem_edges.begin(), p.stem_edges.end());
                out.push_back(std::move(p));
                return;
            }
            pick_tangle(j + 1, par);  // this tangle vertex stays out
            const auto& nb = ynb[j];
            int a = static_cast<int>(nb.size());
            for (unsigned mask = 0; mask < (1u << a); ++mask) {
                if (std::popcount(mask) < 2) continue;
                std::vector<int> p2 = par;
                std::vector<int> roots;
                bool ok = true;
                for (int i = 0; i < a && ok; ++i) {
                    if (!(mask >> i & 1u)) continue;
                    int r = find(p2, slot.at(nb[i]));
                    if (std::find(roots.begin(), roots.end(), r) != roots.end())
                        ok = false;  // two attachments in one component: a cycle
                    else
                        roots.push_back(r);
                }
                if (!ok) continue;
                for (size_t q = 1; q < roots.size(); ++q) p2[roots[q]] = roots[0];
                cur.tangle.push_back(Y[j]);
                size_t base = cur.tangle_edges.size();
                for (int i = 0; i < a; ++i)
                    if (mask >> i & 1u) cur.tangle_edges.push_back(make_edge(Y[j], nb[i]));
                pick_tangle(j + 1, std::move(p2));
                cur.tangle.pop_back();
                cur.tangle_edges.resize(base);
            }
        };

    std::function<void(size_t, std::vector<int>)> pick_flower =
        [&](size_t i, std::vector<int> par) {
            if (i == flower_edges.size()) {
                pick_tangle(0, std::move(par));
                return;
            }
            pick_flower(i + 1, par);  // flower edge unused
            auto [u, v] = flower_edges[i];
            int ru = find(par, slot.at(u)), rv = find(par, slot.at(v));
            if (ru == rv) return;
            par[ru] = rv;
            cur.stem_edges.push_back(flower_edges[i]);
            pick_flower(i + 1, std::move(par));
            cur.stem_edges.pop_back();
        };

    std::vector<int> parent(X.size());
    std::iota(parent.begin(), parent.end(), 0);
    pick_flower(0, std::move(parent));
    return out;
}

namespace detail {

// Stem terminals would blur the tangle bookkeeping, so each stem carrying a
// terminal gets a pendant copy that takes over its pairs and joins the
// tangle as a degree-one vertex. Every solution gains exactly the pendant
// edges, so optima transfer back unchanged; inputs without stem terminals
// pass through untouched.
struct LiftedTangle {
    Graph g2;
    TerminalSet t2;
    std::vector<int> stems;
    std::vector<int> tangle;
    std::map<Edge, Citrus> citrus;
    int original_n = 0;
};

inline LiftedTangle lift_stem_terminals(const Graph& g, const BushDecomposition& bush,
                                        const TerminalSet& t) {
    LiftedTangle L;
    L.original_n = g.vertex_count();
    std::vector<char> in_x(L.original_n, 0);
    for (int v : bush.stems) in_x[v] = 1;

    int n2 = L.original_n;
    std::vector<Edge> es = g.edges();
    std::map<int, int> pendant;
    auto moved = [&](int v) {
        if (!in_x[v]) return v;
        auto [it, fresh] = pendant.try_emplace(v, n2);
        if (fresh) es.push_back(make_edge(v, n2++));
        return it->second;
    };
    std::vector<Edge> pairs;
    for (auto [s, u] : t.pairs()) pairs.push_back({moved(s), moved(u)});

    L.g2 = Graph(n2, std::move(es));
    L.t2 = TerminalSet(std::move(pairs));
    L.stems = bush.stems;
    L.tangle = bush.tangle;
    for (auto& [x, p] : pendant) L.tangle.push_back(p);
    std::sort(L.tangle.begin(), L.tangle.end());
    L.citrus = bush.citrus;
    return L;
}

// One pattern's assembled candidate: raw is the union the assembly produced,
// pruned its spanning forest, folded lists the tangle vertices that became
// wedges along the way. Only produced when the pruned forest serves every
// pair; any other outcome means the pattern was a dead end.
struct PatternCandidate {
    std::vector<Edge> raw;
    std::vector<Edge> pruned;
    std::vector<int> folded;
};

// Run one pattern to completion: reject schools that the pattern's stem
// partition cannot hold together, trim leftover tangle terminals down to
// their forced attachments, fold trimmed degree-two stragglers into juicy
// wedges, then assemble a candidate from per-citrus solves.
inline std::optional<PatternCandidate> try_pattern(const LiftedTangle& L,
                                                   const Pattern& P, int ell) {
    const int n2 = L.g2.vertex_count();
    const int k = static_cast<int>(L.stems.size());

    // Strong subsets: the pattern's components, read off on the stems.
    // Pattern tangle vertices inherit the subset of their component.
    std::map<int, int> slot;
    for (int v : L.stems) slot.try_emplace(v, static_cast<int>(slot.size()));
    for (int v : P.tangle) slot.try_emplace(v, static_cast<int>(slot.size()));
    std::vector<int> par(slot.size());
    std::iota(par.begin(), par.end(), 0);
    auto find = [&](int v) {
        while (par[v] != v) v = par[v] = par[par[v]];
        return v;
    };
    for (auto [u, v] : P.stem_edges) par[find(slot.at(u))] = find(slot.at(v));
    for (auto [u, v] : P.tangle_edges) par[find(slot.at(u))] = find(slot.at(v));

    std::map<int, std::vector<int>> by_root;
    for (int v : L.stems) by_root[find(slot.at(v))].push_back(v);
    std::vector<std::vector<int>> subsets;
    for (auto& [r, vs] : by_root) subsets.push_back(vs);
    std::sort(subsets.begin(), subsets.end());
    const int nsub = static_cast<int>(subsets.size());
    std::vector<int> sub_of(n2, -1);
    for (int i = 0; i < nsub; ++i)
        for (int v : subsets[i]) sub_of[v] = i;
    std::map<int, int> psub;
    for (int y : P.tangle) psub[y] = sub_of[by_root.at(find(slot.at(y))).front()];

    Graph gw = L.g2;
    std::set<int> tangle(L.tangle.begin(), L.tangle.end());
    std::set<int> inP(P.tangle.begin(), P.tangle.end());
    std::map<Edge, Citrus> cit = L.citrus;

    auto sees_all = [&](const std::vector<int>& S, int A) {
        for (int v : S) {
            bool hit = false;
            for (int w : gw.neighbors(v))
                if (sub_of[w] == A) hit = true;
            if (!hit) return false;
        }
        return true;
    };
    auto attach = [&](int y, int sub) {
        for (int w : gw.neighbors(y))
            if (sub_of[w] == sub) return w;  // neighbors ascend, so this is minimal
        return -1;
    };

    Schools sch;
    std::map<int, Edge> lem_of;
    std::vector<int> folded;

    // Rejection, reduction and folding loop. Every pass that does not exit
    // folds at least one tangle vertex away, which bounds the rounds.
    for (int round = 0;; ++round) {
        if (round > n2) return std::nullopt;

        lem_of.clear();
        for (auto& [key, ci] : cit)
            for (auto& w : ci.wedges)
                for (int v : w.interior) lem_of[v] = key;
        sch = schools(L.t2, n2);

        struct Profile {
            bool all_tangle = true;
            std::set<int> strong;                    // subsets holding a strong-lemon terminal
            std::set<std::pair<int, int>> delicate;  // subset pairs holding a delicate one
        };
        std::vector<Profile> prof(sch.count());
        for (int si = 0; si < sch.count(); ++si)
            for (int v : sch.parts[si]) {
                if (!tangle.count(v)) prof[si].all_tangle = false;
                auto it = lem_of.find(v);
                if (it == lem_of.end()) continue;
                int a = sub_of[it->second.first], b = sub_of[it->second.second];
                if (a == b)
                    prof[si].strong.insert(a);
                else
                    prof[si].delicate.insert({std::min(a, b), std::max(a, b)});
            }

        // A school is hopeless under this pattern when its terminals sit in
        // lemons that pull two different subsets together, or when a school
        // confined to the tangle has no subset covering all of it.
        for (int si = 0; si < sch.count(); ++si) {
            auto& pr = prof[si];
            if (pr.all_tangle) {
                bool ok = false;
                for (int A = 0; A < nsub && !ok; ++A) ok = sees_all(sch.parts[si], A);
                if (!ok) return std::nullopt;
            }
            if (pr.strong.size() >= 2) return std::nullopt;
            std::vector<std::pair<int, int>> dl(pr.delicate.begin(), pr.delicate.end());
            for (size_t i = 0; i < dl.size(); ++i)
                for (size_t j = i + 1; j < dl.size(); ++j) {
                    bool share = dl[i].first == dl[j].first ||
                                 dl[i].first == dl[j].second ||
                                 dl[i].second == dl[j].first ||
                                 dl[i].second == dl[j].second;
                    if (!share) return std::nullopt;  // four subsets pulled pairwise
                }
            for (size_t i = 0; i < dl.size(); ++i)
                for (size_t j = i + 1; j < dl.size(); ++j)
                    for (size_t l = j + 1; l < dl.size(); ++l) {
                        std::set<int> ends{dl[i].first,  dl[i].second, dl[j].first,
                                           dl[j].second, dl[l].first,  dl[l].second};
                        if (ends.size() == 3) return std::nullopt;  // delicate triangle
                    }
            for (int A : pr.strong)
                for (auto [a, b] : pr.delicate)
                    if (A != a && A != b) return std::nullopt;
        }

        // Leftover tangle terminals of a school that also reaches into lemons
        // keep only their forced attachments: a single edge towards the one
        // subset the school leans on, or one towards each of the two sides of
        // its sole delicate direction.
        std::set<Edge> kill;
        for (int si = 0; si < sch.count(); ++si) {
            auto& pr = prof[si];
            if (pr.all_tangle) continue;
            std::vector<int> ys;
            for (int v : sch.parts[si])
                if (tangle.count(v) && !inP.count(v)) ys.push_back(v);
            if (ys.empty()) continue;

            std::vector<int> elig;
            for (int A = 0; A < nsub; ++A) {
                bool ok = true;
                for (int v : sch.parts[si]) {
                    auto it = lem_of.find(v);
                    if (it == lem_of.end()) continue;
                    int a = sub_of[it->second.first], b = sub_of[it->second.second];
                    if (a == b ? a != A : (a != A && b != A)) ok = false;
                }
                if (ok) elig.push_back(A);
            }
            if (elig.empty()) return std::nullopt;

            int A = -1, B = -1;
            if (!pr.strong.empty()) {
                A = *pr.strong.begin();
                if (std::find(elig.begin(), elig.end(), A) == elig.end())
                    return std::nullopt;
            } else {
                A = elig.front();
                std::set<int> others;
                for (auto [a, b] : pr.delicate) others.insert(a == A ? b : a);
                if (others.size() == 1)
                    B = *others.begin();
                else if (others.empty())
                    return std::nullopt;  // no lemon terminal after all
            }
            for (int y : ys) {
                int ka = attach(y, A);
                int kb = B >= 0 ? attach(y, B) : -1;
                if (ka < 0 && kb < 0) return std::nullopt;
                if (B < 0 && ka < 0) return std::nullopt;
                for (int w : gw.neighbors(y))
                    if (w != ka && w != kb) kill.insert(make_edge(y, w));
            }
        }
        if (!kill.empty()) {
            std::vector<Edge> es;
            for (auto e : gw.edges())
                if (!kill.count(e)) es.push_back(e);
            gw = Graph(n2, std::move(es));
        }

        // A trimmed tangle vertex of degree two stops being a guess: it is a
        // juicy wedge between its two remaining stems from here on.
        std::vector<int> folds;
        for (int y : tangle)
            if (!inP.count(y) && gw.degree(y) == 2) folds.push_back(y);
        if (folds.empty()) break;
        for (int y : folds) {
            auto nb = gw.neighbors(y);
            if (sub_of[nb[0]] < 0 || sub_of[nb[1]] < 0) return std::nullopt;
            Edge key = make_edge(nb[0], nb[1]);
            auto& ci = cit[key];
            if (ci.wedges.empty() && !ci.direct_edge) {
                ci.x = key.first;
                ci.y = key.second;
                ci.direct_edge = gw.has_edge(key.first, key.second);
            }
            Wedge w;
            w.x = key.first;
            w.y = key.second;
            w.interior = {y};
            w.cls = WedgeClass::Juicy;
            ci.wedges.push_back(std::move(w));
            tangle.erase(y);
            folded.push_back(y);
        }
    }

    // Assembly: pattern tangle edges verbatim, leftover tangle attachments,
    // then every citrus in the role its subset placement dictates.
    std::vector<Edge> raw(P.tangle_edges.begin(), P.tangle_edges.end());

    for (int si = 0; si < sch.count(); ++si) {
        const auto& S = sch.parts[si];
        bool all_tangle = true;
        for (int v : S) all_tangle = all_tangle && tangle.count(v) > 0;
        if (all_tangle) {
            int A = -1;
            for (int v : S)
                if (inP.count(v)) {
                    int s = psub.at(v);
                    if (A >= 0 && s != A) return std::nullopt;  // school straddles subsets
                    A = s;
                }
            if (A < 0)
                for (int c = 0; c < nsub && A < 0; ++c)
                    if (sees_all(S, c)) A = c;
            if (A < 0) return std::nullopt;
            for (int v : S) {
                if (inP.count(v)) continue;
                int w = attach(v, A);
                if (w < 0) return std::nullopt;
                raw.push_back(make_edge(v, w));
            }
        } else {
            for (int v : S) {
                if (!tangle.count(v) || inP.count(v)) continue;
                if (gw.degree(v) == 1) raw.push_back(make_edge(v, gw.neighbors(v)[0]));
                // degree zero cannot be served; the feasibility gate decides
            }
        }
    }

    std::set<Edge> pat(P.stem_edges.begin(), P.stem_edges.end());
    std::map<std::pair<int, int>, std::vector<Edge>> groups;
    for (auto& [key, ci] : cit) {
        int a = sub_of[key.first], b = sub_of[key.second];
        if (!pat.count(key) && a != b) {
            groups[{std::min(a, b), std::max(a, b)}].push_back(key);
            continue;
        }
        // Pattern lemons must link their ends themselves; strong lemons get
        // their ends linked by the rest of the subset's component.
        CitrusSolveMode mode =
            pat.count(key) ? CitrusSolveMode::Intertwined : CitrusSolveMode::Identified;
        std::vector<Edge> want;
        for (auto [s, u] : L.t2.pairs()) {
            bool sin = lem_of.count(s) && lem_of.at(s) == key;
            bool uin = lem_of.count(u) && lem_of.at(u) == key;
            if (sin && uin)
                want.push_back({s, u});
            else if (sin)
                want.push_back({s, ci.x});
            else if (uin)
                want.push_back({u, ci.x});
        }
        if (want.empty() && mode == CitrusSolveMode::Identified) continue;
        Subgraph sub = induced_subgraph(gw, ci.vesicle());
        Citrus local = relabel_citrus(ci, sub.new_id);
        TerminalSet tl = TerminalSet(std::move(want)).relabel(sub.new_id);
        try {
            SteinerForest f = solve_citrus(sub.graph, local, tl, mode, ell);
            for (auto e : sub.lift(f.edges)) raw.push_back(e);
        } catch (const InfeasibleError&) {
            return std::nullopt;
        }
    }

    // All delicate lemons between one subset pair merge into a single wider
    // citrus: ends of each side identified into one hub, the hub edge (if
    // any) dropped because the sides must stay apart.
    for (auto& [ab, keys] : groups) {
        auto [A, B] = ab;
        std::set<Edge> keyset(keys.begin(), keys.end());
        auto inside = [&](int v) {
            auto it = lem_of.find(v);
            return it != lem_of.end() && keyset.count(it->second) > 0;
        };
        // Which hub an outside partner leans on: its own lemon's touching
        // subset, its pattern component, or the subset its single kept edge
        // points to. No resolution means the pair cannot be served here.
        auto side_of = [&](int v) {
            auto it = lem_of.find(v);
            if (it != lem_of.end()) {
                int a = sub_of[it->second.first], b = sub_of[it->second.second];
                if (a == b) return a == A ? 0 : a == B ? 1 : -1;
                bool ha = a == A || b == A, hb = a == B || b == B;
                if (ha != hb) return ha ? 0 : 1;
                return -1;
            }
            if (inP.count(v)) {
                int s = psub.at(v);
                return s == A ? 0 : s == B ? 1 : -1;
            }
            if (tangle.count(v) && gw.degree(v) == 1) {
                int s = sub_of[gw.neighbors(v)[0]];
                return s == A ? 0 : s == B ? 1 : -1;
            }
            return -1;
        };

        std::vector<std::array<int, 3>> dem;  // {s, t, -1} inside, {s, -1, hub}
        for (auto [s, u] : L.t2.pairs()) {
            bool si = inside(s), ui = inside(u);
            if (si && ui)
                dem.push_back({s, u, -1});
            else if (si) {
                int sd = side_of(u);
                if (sd >= 0) dem.push_back({s, -1, sd});
            } else if (ui) {
                int sd = side_of(s);
                if (sd >= 0) dem.push_back({u, -1, sd});
            }
        }
        if (dem.empty()) continue;

        std::vector<int> vs;
        for (Edge key : keys) {
            auto ves = cit.at(key).vesicle();
            vs.insert(vs.end(), ves.begin(), ves.end());
        }
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        Subgraph msub = induced_subgraph(gw, vs);

        std::vector<int> endsA, endsB;
        for (Edge key : keys) {
            (sub_of[key.first] == A ? endsA : endsB).push_back(msub.new_id[key.first]);
            (sub_of[key.second] == A ? endsA : endsB).push_back(msub.new_id[key.second]);
        }
        for (auto* ends : {&endsA, &endsB}) {
            std::sort(ends->begin(), ends->end());
            ends->erase(std::unique(ends->begin(), ends->end()), ends->end());
        }
        Identification I1 = identify_set(msub.graph, endsA);
        std::vector<int> b1;
        for (int v : endsB) b1.push_back(I1.vertex_map[v]);
        std::sort(b1.begin(), b1.end());
        b1.erase(std::unique(b1.begin(), b1.end()), b1.end());
        Identification I2 = identify_set(I1.graph, b1);
        int a2 = I2.vertex_map[I1.merged], b2 = I2.merged;

        Graph cur = I2.graph;
        if (cur.has_edge(a2, b2)) {
            std::vector<Edge> es;
            for (auto e : cur.edges())
                if (e != make_edge(a2, b2)) es.push_back(e);
            cur = Graph(cur.vertex_count(), std::move(es));
        }

        std::vector<int> cmap(n2, -1);
        for (int v : vs) cmap[v] = I2.vertex_map[I1.vertex_map[msub.new_id[v]]];

        Citrus mc;
        mc.x = std::min(a2, b2);
        mc.y = std::max(a2, b2);
        mc.direct_edge = false;
        for (Edge key : keys) {
            Citrus rc = relabel_citrus(cit.at(key), cmap);
            for (auto& w : rc.wedges) mc.wedges.push_back(std::move(w));
        }

        std::vector<Edge> tl;
        for (auto& d : dem) {
            int s = cmap[d[0]];
            int u = d[1] >= 0 ? cmap[d[1]] : (d[2] == 0 ? a2 : b2);
            tl.push_back({s, u});
        }
        try {
            SteinerForest f = solve_citrus(cur, mc, TerminalSet(std::move(tl)),
                                           CitrusSolveMode::Free, ell, k * k * ell);
            for (auto e : f.edges) raw.push_back(msub.lift(I1.lift(I2.lift(e))));
        } catch (const InfeasibleError&) {
            return std::nullopt;
        }
    }

    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
    std::vector<Edge> pruned = spanning_forest(n2, raw);
    if (!is_valid_forest(L.g2, L.t2, pruned)) return std::nullopt;
    std::sort(folded.begin(), folded.end());
    return PatternCandidate{std::move(raw), std::move(pruned), std::move(folded)};
}

}  // namespace detail

// Entangled-bush solver: guess the pattern of a solution, force every school
// into the arrangement the pattern allows, and stitch the per-citrus optima
// together. The best feasible candidate over all patterns is optimal.
inline SteinerForest solve_entangled(const Graph& g, const std::vector<int>& X,
                                     const std::vector<int>& Y,
                                     const BushDecomposition& bush,
                                     const TerminalSet& t, int ell) {
    std::vector<int> xs(X), ys(Y);
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    if (xs != bush.stems || ys != bush.tangle)
        throw std::invalid_argument("solve_entangled: stems or tangle do not match the bush");
    if (t.empty()) return SteinerForest{};
    if (t.max_vertex() >= g.vertex_count())
        throw std::invalid_argument("solve_entangled: terminal outside the graph");

    detail::LiftedTangle L = detail::lift_stem_terminals(g, bush, t);
    std::vector<Pattern> pats =
        enumerate_patterns(L.stems, L.tangle, bush.flower_edges, L.g2);

    std::optional<std::vector<Edge>> best;
    for (const Pattern& P : pats) {
        auto cand = detail::try_pattern(L, P, ell);
        if (!cand) continue;
        std::vector<Edge> fin;
        for (auto e : cand->pruned)
            if (e.second < L.original_n) fin.push_back(e);
        if (!is_valid_forest(g, t, fin)) continue;
        if (!best || forest_less(fin, *best)) best = std::move(fin);
    }
    if (!best) throw InfeasibleError("no pattern yields a feasible forest");
    return SteinerForest(std::move(*best));
}

inline SteinerForest solve_entangled(const Graph& g, const BushDecomposition& bush,
                                     const TerminalSet& t, int ell) {
    return solve_entangled(g, bush.stems, bush.tangle, bush, t, ell);
}

}  // namespace steiner
