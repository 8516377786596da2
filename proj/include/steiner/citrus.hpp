#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "paths.hpp"
#include "sp_solver.hpp"

namespace steiner {

// A wedge hangs between two ends: its interior is connected, sees exactly
// the two ends outside itself, and is classified by how hard the closure
// (induced subgraph plus the xy edge) is to solve.
enum class WedgeClass { Juicy, Seeded, Pulped };

struct Wedge {
    int x = -1, y = -1;         // ends, x < y
    std::vector<int> interior;  // sorted, nonempty
    WedgeClass cls = WedgeClass::Juicy;

    int size() const { return static_cast<int>(interior.size()) + 2; }
    std::vector<int> vertices() const {
        std::vector<int> vs = interior;
        vs.insert(std::upper_bound(vs.begin(), vs.end(), x), x);
        vs.insert(std::upper_bound(vs.begin(), vs.end(), y), y);
        return vs;
    }
};

// All wedges between one end pair, plus the direct edge if present.
struct Citrus {
    int x = -1, y = -1;
    bool direct_edge = false;
    std::vector<Wedge> wedges;

    bool empty() const { return wedges.empty() && !direct_edge; }
    int pulped_count() const {
        int c = 0;
        for (const auto& w : wedges) c += w.cls == WedgeClass::Pulped;
        return c;
    }
    // Sorted union of ends and all wedge interiors.
    std::vector<int> vesicle() const {
        std::vector<int> vs{x, y};
        for (const auto& w : wedges)
            vs.insert(vs.end(), w.interior.begin(), w.interior.end());
        std::sort(vs.begin(), vs.end());
        return vs;
    }
};

// Wedge sizes and counts that a citrus may carry and still be solvable with
// budget ell; the count bound is relaxed separately for super-lemons.
inline bool is_lemon(const Citrus& c, int ell, int pulped_bound) {
    int pulped = 0;
    for (const auto& w : c.wedges) {
        if (w.cls == WedgeClass::Juicy || w.cls == WedgeClass::Seeded) continue;
        if (w.size() > ell) return false;
        ++pulped;
    }
    return pulped <= pulped_bound;
}

inline bool is_lemon(const Citrus& c, int ell) { return is_lemon(c, ell, ell); }

namespace detail {

// Interior already known to satisfy the wedge predicate.
inline WedgeClass classify_interior(const Graph& g, const std::vector<int>& interior,
                                    int x, int y) {
    std::vector<int> keep = interior;
    keep.insert(std::upper_bound(keep.begin(), keep.end(), std::min(x, y)),
                std::min(x, y));
    keep.insert(std::upper_bound(keep.begin(), keep.end(), std::max(x, y)),
                std::max(x, y));
    Subgraph sub = induced_subgraph(g, keep);
    Graph closure = sub.graph.with_edge(sub.new_id[x], sub.new_id[y]);
    if (treewidth_at_most_2(closure)) return WedgeClass::Juicy;
    return interior.size() == 2 ? WedgeClass::Seeded : WedgeClass::Pulped;
}

}  // namespace detail

// Classification of a claimed wedge; rejects sets that fail the predicate.
inline WedgeClass classify_wedge(const Graph& g, const std::vector<int>& L, int x,
                                 int y) {
    std::vector<int> vs = L;
    std::sort(vs.begin(), vs.end());
    if (vs.size() < 3 || std::adjacent_find(vs.begin(), vs.end()) != vs.end())
        throw std::invalid_argument("not a wedge: bad vertex set");
    std::vector<int> interior;
    bool saw_x = false, saw_y = false;
    for (int v : vs) {
        if (v == x) saw_x = true;
        else if (v == y) saw_y = true;
        else interior.push_back(v);
    }
    if (!saw_x || !saw_y || x == y)
        throw std::invalid_argument("not a wedge: ends not in set");
    Subgraph in = induced_subgraph(g, interior);
    if (!is_connected(in.graph))
        throw std::invalid_argument("not a wedge: interior disconnected");
    if (neighborhood(g, interior) != std::vector<int>{std::min(x, y), std::max(x, y)})
        throw std::invalid_argument("not a wedge: wrong neighborhood");
    return detail::classify_interior(g, interior, x, y);
}

// All proper wedges of g: for each end pair, the components left by removing
// the pair whose neighborhood is exactly that pair. The degenerate case where
// the whole graph is one wedge is excluded here (find_citrus handles it);
// otherwise any 2-connected graph would report a wedge at every vertex pair.
inline std::vector<Wedge> enumerate_wedges(const Graph& g) {
    std::vector<Wedge> out;
    int n = g.vertex_count();
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
            for (auto& comp : components_after_removal(g, {x, y})) {
                if (static_cast<int>(comp.size()) + 2 == n) continue;
                if (neighborhood(g, comp) != std::vector<int>{x, y}) continue;
                Wedge w;
                w.x = x;
                w.y = y;
                w.interior = comp;
                w.cls = detail::classify_interior(g, comp, x, y);
                out.push_back(std::move(w));
            }
    return out;
}

// The citrus sitting between two fixed ends (possibly empty).
inline Citrus make_citrus(const Graph& g, int x, int y) {
    Citrus c;
    c.x = std::min(x, y);
    c.y = std::max(x, y);
    c.direct_edge = g.has_edge(x, y);
    for (auto& comp : components_after_removal(g, {c.x, c.y})) {
        if (neighborhood(g, comp) != std::vector<int>{c.x, c.y}) continue;
        Wedge w;
        w.x = c.x;
        w.y = c.y;
        w.interior = comp;
        w.cls = detail::classify_interior(g, comp, c.x, c.y);
        c.wedges.push_back(std::move(w));
    }
    return c;
}

// Is the whole graph one citrus? Ends are the smallest pair for which every
// leftover component is a wedge interior between them.
inline std::optional<Citrus> find_citrus(const Graph& g) {
    int n = g.vertex_count();
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
            bool all = true;
            for (auto& comp : components_after_removal(g, {x, y}))
                if (neighborhood(g, comp) != std::vector<int>{x, y}) all = false;
            if (!all) continue;
            Citrus c = make_citrus(g, x, y);
            if (!c.empty()) return c;
        }
    return std::nullopt;
}

// A bush: stem vertices carrying a flower graph, one citrus per flower
// edge, and (for entangled bushes) a tangle of stem-only neighbours.
// For cycle bushes `stems` is in cyclic order; otherwise ascending.
struct BushDecomposition {
    std::vector<int> stems;
    std::vector<Edge> flower_edges;
    std::map<Edge, Citrus> citrus;
    std::vector<int> tangle;
};

namespace detail {

// Positions strictly between `from` and `to`, walking forward around a
// cycle of length c.
inline std::vector<int> open_arc(int from, int to, int c) {
    std::vector<int> out;
    for (int p = (from + 1) % c; p != to; p = (p + 1) % c) out.push_back(p);
    return out;
}

struct ArcConstraint {
    // Each choice is a set of cycle positions that must not be stems;
    // at least one choice must hold.
    std::vector<std::vector<int>> choices;
};

// Validate a stem choice on the cycle and assemble the bush.
inline std::optional<BushDecomposition> assemble_cycle_bush(
    const Graph& g, const std::vector<int>& cyc, const std::vector<char>& excluded,
    int ell) {
    int c = static_cast<int>(cyc.size());
    std::vector<int> stem_pos;
    for (int p = 0; p < c; ++p)
        if (!excluded[p]) stem_pos.push_back(p);
    int s = static_cast<int>(stem_pos.size());
    if (s < 3) return std::nullopt;

    std::vector<int> stems;
    for (int p : stem_pos) stems.push_back(cyc[p]);
    std::set<Edge> consecutive;
    for (int i = 0; i < s; ++i)
        consecutive.insert(make_edge(stems[i], stems[(i + 1) % s]));
    if (static_cast<int>(consecutive.size()) != s) return std::nullopt;

    std::vector<char> is_stem(g.vertex_count(), 0);
    for (int v : stems) is_stem[v] = 1;

    // every leftover component must be a wedge between consecutive stems;
    // note the removal is of the whole stem set, so sibling citruses cannot
    // leak into each other's wedges
    std::map<Edge, std::vector<std::vector<int>>> interiors;
    for (auto& comp : components_after_removal(g, stems)) {
        auto nb = neighborhood(g, comp);
        if (nb.size() != 2 || !consecutive.count(make_edge(nb[0], nb[1])))
            return std::nullopt;
        interiors[make_edge(nb[0], nb[1])].push_back(comp);
    }
    // stem-to-stem edges may only join consecutive stems
    for (auto [u, w] : g.edges())
        if (is_stem[u] && is_stem[w] && !consecutive.count(make_edge(u, w)))
            return std::nullopt;

    BushDecomposition bush;
    bush.stems = stems;
    for (const Edge& e : consecutive) {
        Citrus ci;
        ci.x = e.first;
        ci.y = e.second;
        ci.direct_edge = g.has_edge(e.first, e.second);
        for (auto& comp : interiors[e]) {
            Wedge w;
            w.x = e.first;
            w.y = e.second;
            w.interior = comp;
            w.cls = classify_interior(g, comp, w.x, w.y);
            ci.wedges.push_back(std::move(w));
        }
        if (ci.empty() || !is_lemon(ci, ell)) return std::nullopt;
        bush.flower_edges.push_back(e);
        bush.citrus.emplace(e, std::move(ci));
    }
    return bush;
}

}  // namespace detail

// Cycle-bush detection: fix a longest cycle, gather separation constraints
// from chords and from components hanging off the cycle, and branch over
// which arc each constraint banishes from the stem set. First stem choice
// that survives full validation wins.
inline std::optional<BushDecomposition> detect_cycle_bush(const Graph& g, int ell) {
    if (g.vertex_count() < 3) return std::nullopt;
    auto ce = longest_cycle(g);
    if (!ce || ce->vertices.empty()) return std::nullopt;
    const auto& cyc = ce->vertices;
    int c = static_cast<int>(cyc.size());
    std::vector<int> pos(g.vertex_count(), -1);
    for (int p = 0; p < c; ++p) pos[cyc[p]] = p;

    std::vector<detail::ArcConstraint> constraints;
    auto add_spread = [&](std::vector<int> ps) {
        // neighbours at these cycle positions must share one citrus region:
        // choose a gap to face outward, banishing everything spanned by the
        // rest (interior attachment points included)
        std::sort(ps.begin(), ps.end());
        detail::ArcConstraint ac;
        int r = static_cast<int>(ps.size());
        if (r == 1) {
            ac.choices.push_back(ps);  // a one-point attachment is never a stem
        } else {
            for (int j = 0; j < r; ++j)
                ac.choices.push_back(detail::open_arc(ps[(j + 1) % r], ps[j], c));
        }
        std::sort(ac.choices.begin(), ac.choices.end(),
                  [](const std::vector<int>& a, const std::vector<int>& b) {
                      return a.size() != b.size() ? a.size() < b.size() : a < b;
                  });
        constraints.push_back(std::move(ac));
    };

    for (auto& comp : components_after_removal(g, cyc)) {
        auto nb = neighborhood(g, comp);
        if (nb.empty()) return std::nullopt;  // piece disconnected from the cycle
        std::vector<int> ps;
        for (int v : nb) ps.push_back(pos[v]);
        add_spread(std::move(ps));
    }
    for (auto [u, w] : g.edges()) {
        if (pos[u] < 0 || pos[w] < 0) continue;
        int du = (pos[w] - pos[u] + c) % c;
        if (du == 1 || du == c - 1) continue;  // cycle edge
        add_spread({pos[u], pos[w]});
    }
    // duplicate constraints (parallel wedges, repeated chords) collapse
    {
        std::set<std::vector<std::vector<int>>> seen;
        std::vector<detail::ArcConstraint> uniq;
        for (auto& ac : constraints)
            if (seen.insert(ac.choices).second) uniq.push_back(std::move(ac));
        constraints = std::move(uniq);
    }

    std::vector<char> excluded(c, 0);
    int visits = 0;
    std::optional<BushDecomposition> found;
    auto covered = [&](const std::vector<int>& arc) {
        for (int p : arc)
            if (!excluded[p]) return false;
        return true;
    };
    auto dfs = [&](auto&& self, size_t at, int live) -> void {
        if (found || live < 3) return;
        if (++visits > 200000)
            throw TooLargeError("cycle bush detection: too many stem candidates");
        if (at == constraints.size()) {
            found = detail::assemble_cycle_bush(g, cyc, excluded, ell);
            return;
        }
        const auto& ac = constraints[at];
        for (const auto& choice : ac.choices)
            if (covered(choice)) {
                self(self, at + 1, live);
                return;  // already satisfied; further exclusion is redundant
            }
        for (const auto& choice : ac.choices) {
            std::vector<int> fresh;
            for (int p : choice)
                if (!excluded[p]) {
                    excluded[p] = 1;
                    fresh.push_back(p);
                }
            self(self, at + 1, live - static_cast<int>(fresh.size()));
            for (int p : fresh) excluded[p] = 0;
            if (found) return;
        }
    };
    dfs(dfs, 0, c);
    return found;
}

// Entangled-bush acceptance for a fixed stem set: the tangle collects
// vertices seeing only stems with degree one or at least three (degree-two
// ones count as juicy wedges instead); whatever is left must fall into
// wedges between stem pairs, within the lemon bounds.
inline std::optional<BushDecomposition> try_entangled_stems(const Graph& g,
                                                            std::vector<int> X,
                                                            int ell) {
    std::sort(X.begin(), X.end());
    std::vector<char> in_x(g.vertex_count(), 0);
    for (int v : X) in_x[v] = 1;

    std::vector<int> Y;
    for (int v = 0; v < g.vertex_count(); ++v) {
        if (in_x[v]) continue;
        int deg = g.degree(v);
        if (deg != 1 && deg < 3) continue;
        bool only_stems = true;
        for (int w : g.neighbors(v))
            if (!in_x[w]) only_stems = false;
        if (only_stems) Y.push_back(v);
    }

    std::vector<int> drop = X;
    drop.insert(drop.end(), Y.begin(), Y.end());
    std::map<Edge, Citrus> citrus;
    for (auto& comp : components_after_removal(g, drop)) {
        auto nb = neighborhood(g, comp);
        if (nb.size() != 2 || !in_x[nb[0]] || !in_x[nb[1]]) return std::nullopt;
        Edge ends = make_edge(nb[0], nb[1]);
        auto& ci = citrus[ends];
        if (ci.wedges.empty() && !ci.direct_edge) {
            ci.x = ends.first;
            ci.y = ends.second;
            ci.direct_edge = g.has_edge(ends.first, ends.second);
        }
        Wedge w;
        w.x = ends.first;
        w.y = ends.second;
        w.interior = comp;
        w.cls = detail::classify_interior(g, comp, w.x, w.y);
        ci.wedges.push_back(std::move(w));
    }
    // direct stem-stem edges are citruses even without wedges
    for (auto [u, w] : g.edges())
        if (in_x[u] && in_x[w]) {
            Edge ends = make_edge(u, w);
            auto& ci = citrus[ends];
            if (ci.wedges.empty() && !ci.direct_edge) {
                ci.x = ends.first;
                ci.y = ends.second;
            }
            ci.direct_edge = true;
        }

    BushDecomposition bush;
    bush.stems = std::move(X);
    bush.tangle = std::move(Y);
    for (auto& [e, ci] : citrus) {
        if (!is_lemon(ci, ell)) return std::nullopt;
        bush.flower_edges.push_back(e);
    }
    bush.citrus = std::move(citrus);
    return bush;
}

// Path-bush detection: the block-cut tree must be a path, and each block one
// lemon citrus whose end pair covers the block's cut vertices. Free ends are
// searched ascending, so the result is deterministic. Bridges count as
// direct-edge citruses, which keeps plain paths and caterpillar-ish chains in
// scope even though tw2 usually claims those first.
inline std::optional<BushDecomposition> detect_path_bush(const Graph& g, int ell) {
    int n = g.vertex_count();
    if (n < 2 || !is_connected(g)) return std::nullopt;
    BlockDecomposition bd = biconnected_components(g);
    int nb = static_cast<int>(bd.block_vertices.size());

    std::vector<char> cut(n, 0);
    for (int v : bd.cut_vertices) cut[v] = 1;
    std::vector<int> blocks_at(n, 0);
    for (const auto& bl : bd.block_vertices)
        for (int v : bl) ++blocks_at[v];
    for (int v : bd.cut_vertices)
        if (blocks_at[v] != 2) return std::nullopt;  // flower node of degree > 2

    BushDecomposition bush;
    std::set<int> stems;
    for (const auto& bl : bd.block_vertices) {
        if (bl.size() < 2) return std::nullopt;  // isolated vertex
        std::vector<int> fixed;
        for (int v : bl)
            if (cut[v]) fixed.push_back(v);
        if (fixed.size() > 2) return std::nullopt;

        Subgraph sub = induced_subgraph(g, bl);
        // Ends are valid when every leftover piece of the block is a wedge
        // between them and the assembled citrus is a lemon. make_citrus on the
        // full graph is safe here: sibling blocks hang off at most one end, so
        // their components never see both.
        std::optional<Edge> ends;
        Citrus found;
        auto consider = [&](int gx, int gy) {
            if (ends || gx == gy) return;
            int lx = sub.new_id[gx], ly = sub.new_id[gy];
            for (const auto& comp : components_after_removal(sub.graph, {lx, ly}))
                if (neighborhood(sub.graph, comp) !=
                    std::vector<int>{std::min(lx, ly), std::max(lx, ly)})
                    return;
            Citrus c = make_citrus(g, gx, gy);
            if (c.empty() || !is_lemon(c, ell)) return;
            ends = make_edge(gx, gy);
            found = std::move(c);
        };
        if (fixed.size() == 2) {
            consider(fixed[0], fixed[1]);
        } else if (fixed.size() == 1) {
            for (int v : bl) consider(fixed[0], v);
        } else {  // single-block graph
            for (size_t i = 0; i < bl.size() && !ends; ++i)
                for (size_t j = i + 1; j < bl.size(); ++j) consider(bl[i], bl[j]);
        }
        if (!ends) return std::nullopt;
        bush.flower_edges.push_back(*ends);
        bush.citrus.emplace(*ends, std::move(found));
        stems.insert(ends->first);
        stems.insert(ends->second);
    }

    bush.stems.assign(stems.begin(), stems.end());
    // nb flower edges over nb+1 stems with degree <= 2: a path.
    if (static_cast<int>(bush.stems.size()) != nb + 1) return std::nullopt;
    std::map<int, int> deg;
    for (const auto& [u, v] : bush.flower_edges) {
        if (++deg[u] > 2 || ++deg[v] > 2) return std::nullopt;
    }
    return bush;
}

// Search for an entangled bush with at most k stems: a caller-provided
// candidate first, then the longest path, then all small subsets
// (size-ascending, lexicographic) — the first acceptable stem set wins.
inline std::optional<BushDecomposition> detect_entangled_bush(
    const Graph& g, int k, int ell,
    const std::optional<std::vector<int>>& candidate_stems = std::nullopt) {
    int n = g.vertex_count();
    if (candidate_stems) {
        if (static_cast<int>(candidate_stems->size()) > k) return std::nullopt;
        return try_entangled_stems(g, *candidate_stems, ell);
    }
    if (n > 0) {
        auto p = longest_path(g).vertices;
        if (static_cast<int>(p.size()) <= k)
            if (auto bush = try_entangled_stems(g, p, ell)) return bush;
    }
    for (int size = 0; size <= std::min(k, n); ++size) {
        std::vector<int> comb(size);
        for (int i = 0; i < size; ++i) comb[i] = i;
        while (true) {
            if (auto bush = try_entangled_stems(g, comb, ell)) return bush;
            int i = size - 1;
            while (i >= 0 && comb[i] == n - size + i) --i;
            if (i < 0) break;
            ++comb[i];
            for (int j = i + 1; j < size; ++j) comb[j] = comb[j - 1] + 1;
        }
    }
    return std::nullopt;
}

}  // namespace steiner
