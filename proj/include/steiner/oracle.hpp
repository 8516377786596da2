#pragma once

#include <bit>
#include <cstdint>
#include <limits>
#include <vector>

#include "graph.hpp"
#include "terminals.hpp"

namespace steiner {

namespace detail {

// Size-only minimum Steiner forest via subset dynamic programming: process
// vertex sets S in increasing mask order; the cheapest forest whose vertex
// set is (a subset of) S and which finishes every school inside S is obtained
// by splitting off one tree component C (connected, carrying at least one
// school, never splitting a school between C and the rest).
class FullSetDp {
public:
    static constexpr int kMaxVertices = 18;
    static constexpr int16_t kInf = std::numeric_limits<int16_t>::max() / 2;

    FullSetDp(const Graph& g, const TerminalSet& t) : g_(g) {
        n_ = g.vertex_count();
        if (n_ > kMaxVertices) throw TooLargeError("exact solver supports at most 18 vertices");
        sch_ = schools(t, n_);
        q_ = sch_.count();
        if (q_ > 15) throw TooLargeError("exact solver supports at most 15 schools");
        nbr_.assign(n_, 0);
        for (int v = 0; v < n_; ++v)
            for (int w : g.neighbors(v)) nbr_[v] |= uint32_t(1) << w;
        school_mask_.assign(q_, 0);
        for (int i = 0; i < q_; ++i)
            for (int v : sch_.parts[i]) school_mask_[i] |= uint32_t(1) << v;

        uint32_t total = n_ == 0 ? 0 : (n_ == 32 ? ~uint32_t(0) : (uint32_t(1) << n_) - 1);
        full_ = total;
        conn_.assign(size_t(1) << n_, 0);
        closed_.assign(size_t(1) << n_, 0);
        for (uint32_t s = 1; s <= full_ && full_; ++s) {
            conn_[s] = compute_connected(s);
            uint16_t cm = 0;
            for (int i = 0; i < q_; ++i)
                if ((s & school_mask_[i]) == school_mask_[i]) cm |= uint16_t(1) << i;
            closed_[s] = cm;
            if (s == full_) break;
        }
        f_.assign(size_t(1) << n_, kInf);
    }

    // Minimum forest size for the whole instance, or -1 if infeasible.
    int solve() {
        for (uint32_t s = 0;; ++s) {
            f_[s] = value(s);
            if (s == full_) break;
        }
        return f_[full_] >= kInf ? -1 : f_[full_];
    }

    // One optimal tree component inside S (as its vertex mask), chosen
    // deterministically, together with the remaining set. Requires solve().
    bool split(uint32_t s, uint32_t& tree, uint32_t& rest) const {
        if (closed_[s] == 0) return false;
        for (uint32_t c = s; c; c = (c - 1) & s) {
            if (!conn_[c]) continue;
            uint32_t sp = s & ~c;
            uint16_t cm = closed_[c], rm = closed_[sp];
            if ((cm & closed_[s]) == 0) continue;
            if (uint16_t((cm | rm) & closed_[s]) != closed_[s]) continue;
            if (f_[sp] + std::popcount(c) - 1 == f_[s]) {
                tree = c;
                rest = sp;
                return true;
            }
        }
        return false;
    }

    const Schools& the_schools() const { return sch_; }

private:
    int16_t value(uint32_t s) const {
        if (closed_[s] == 0) return 0;
        int16_t best = kInf;
        for (uint32_t c = s; c; c = (c - 1) & s) {
            if (!conn_[c]) continue;
            uint32_t sp = s & ~c;
            uint16_t cm = closed_[c], rm = closed_[sp];
            // The split-off tree must finish at least one school of S, and no
            // school of S may straddle the split.
            if ((cm & closed_[s]) == 0) continue;
            if (uint16_t((cm | rm) & closed_[s]) != closed_[s]) continue;
            int16_t cand = int16_t(f_[sp] + std::popcount(c) - 1);
            if (cand < best) best = cand;
        }
        return best;
    }

    bool compute_connected(uint32_t s) const {
        int start = std::countr_zero(s);
        uint32_t seen = uint32_t(1) << start;
        uint32_t frontier = seen;
        while (frontier) {
            uint32_t next = 0;
            while (frontier) {
                int v = std::countr_zero(frontier);
                frontier &= frontier - 1;
                next |= nbr_[v] & s & ~seen;
            }
            seen |= next;
            frontier = next;
        }
        return seen == s;
    }

    const Graph& g_;
    int n_ = 0, q_ = 0;
    uint32_t full_ = 0;
    Schools sch_;
    std::vector<uint32_t> nbr_, school_mask_;
    std::vector<uint8_t> conn_;
    std::vector<uint16_t> closed_;
    std::vector<int16_t> f_;
};

inline int exact_forest_size(const Graph& g, const TerminalSet& t) {
    if (t.empty()) return 0;
    FullSetDp dp(g, t);
    return dp.solve();
}

// Deterministic minimum forest by DP reconstruction: peel off tree components
// in enumeration order, spanning each with the greedy sorted-edge tree.
inline std::vector<Edge> reconstruct_forest(const Graph& g, const TerminalSet& t) {
    FullSetDp dp(g, t);
    if (dp.solve() < 0) throw InfeasibleError("terminal pair cannot be connected");
    uint32_t s = g.vertex_count() == 32 ? ~uint32_t(0)
                                        : (uint32_t(1) << g.vertex_count()) - 1;
    std::vector<Edge> out;
    uint32_t tree, rest;
    while (dp.split(s, tree, rest)) {
        std::vector<Edge> inside;
        for (const auto& [u, v] : g.edges())
            if (((tree >> u) & 1) && ((tree >> v) & 1)) inside.emplace_back(u, v);
        auto span = spanning_forest(g.vertex_count(), inside);
        out.insert(out.end(), span.begin(), span.end());
        s = rest;
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

// Minimum Steiner forest by the subset dynamic program. Among minimum
// forests, instances with at most 12 vertices get the lexicographically
// smallest sorted edge list (decided edge by edge via contraction); larger
// ones get a deterministic reconstruction. Throws InfeasibleError when a pair
// cannot be connected and TooLargeError beyond 18 vertices.
inline SteinerForest solve_exact(const Graph& g, const TerminalSet& t) {
    if (t.empty()) return SteinerForest{};
    if (t.max_vertex() >= g.vertex_count())
        throw std::invalid_argument("terminal outside graph");
    int opt = detail::exact_forest_size(g, t);
    if (opt < 0) throw InfeasibleError("terminal pair cannot be connected");
    if (g.vertex_count() > 12) return SteinerForest(detail::reconstruct_forest(g, t));

    // Greedy lexicographic refinement: an edge belongs to the answer iff some
    // minimum forest consistent with all earlier decisions contains it, which
    // is the case iff contracting it lowers the optimum by one.
    std::vector<Edge> chosen;
    Graph cur = g;
    TerminalSet cur_t = t;
    std::vector<std::vector<int>> blob(g.vertex_count());  // original ids per current vertex
    for (int v = 0; v < g.vertex_count(); ++v) blob[v] = {v};
    int remaining = opt;
    // Process original edges in sorted order; an edge maps into the current
    // quotient graph via its endpoints' blobs.
    std::vector<int> where(g.vertex_count());
    auto refresh = [&]() {
        for (int v = 0; v < cur.vertex_count(); ++v)
            for (int orig : blob[v]) where[orig] = v;
    };
    refresh();
    for (const auto& [ou, ov] : g.edges()) {
        if (remaining == 0) break;
        int u = where[ou], v = where[ov];
        if (u == v) continue;           // already connected by forced edges
        if (!cur.has_edge(u, v)) continue;  // connection ruled out earlier
        auto ident = identify_set(cur, {u, v});
        TerminalSet next_t = cur_t.relabel(ident.vertex_map);
        int sub = detail::exact_forest_size(ident.graph, next_t);
        if (sub >= 0 && sub == remaining - 1) {
            chosen.emplace_back(ou, ov);
            --remaining;
            // Rebuild blob bookkeeping for the contracted graph.
            std::vector<std::vector<int>> nb(ident.graph.vertex_count());
            for (int w = 0; w < cur.vertex_count(); ++w) {
                auto& dst = nb[ident.vertex_map[w]];
                dst.insert(dst.end(), blob[w].begin(), blob[w].end());
            }
            blob = std::move(nb);
            cur = ident.graph;
            cur_t = next_t;
            refresh();
        } else {
            // No minimum forest consistent with earlier decisions uses this
            // connection; drop it so later tests respect the decision.
            cur = cur.without_edge(u, v);
        }
    }
    return SteinerForest(std::move(chosen));
}

// Reference enumeration over all edge subsets, for cross-checking the
// dynamic program on small instances. Ties broken lexicographically.
inline SteinerForest solve_exhaustive(const Graph& g, const TerminalSet& t, int edge_cap = 22) {
    if (g.edge_count() > edge_cap)
        throw TooLargeError("exhaustive solver is capped at " + std::to_string(edge_cap) +
                            " edges");
    if (t.empty()) return SteinerForest{};
    if (t.max_vertex() >= g.vertex_count())
        throw std::invalid_argument("terminal outside graph");
    int m = g.edge_count();
    const auto& es = g.edges();
    int n = g.vertex_count();
    uint32_t best_mask = 0;
    int best_size = -1;
    std::vector<int> parent(n);
    for (uint32_t mask = 0; mask < (uint32_t(1) << m); ++mask) {
        int size = std::popcount(mask);
        if (best_size >= 0 && size > best_size) continue;
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        bool acyclic = true;
        for (uint32_t bits = mask; bits; bits &= bits - 1) {
            const auto& [u, v] = es[std::countr_zero(bits)];
            int ru = find(u), rv = find(v);
            if (ru == rv) {
                acyclic = false;
                break;
            }
            parent[ru] = rv;
        }
        if (!acyclic) continue;
        bool ok = true;
        for (auto [s, u] : t.pairs())
            if (find(s) != find(u)) {
                ok = false;
                break;
            }
        if (!ok) continue;
        if (best_size < 0 || size < best_size) {
            best_size = size;
            best_mask = mask;
        } else if (size == best_size) {
            // Same size: the subset containing the smaller edge at the first
            // difference is the lexicographically smaller edge list.
            uint32_t diff = mask ^ best_mask;
            if (diff && ((mask >> std::countr_zero(diff)) & 1)) best_mask = mask;
        }
    }
    if (best_size < 0) throw InfeasibleError("terminal pair cannot be connected");
    std::vector<Edge> out;
    for (uint32_t bits = best_mask; bits; bits &= bits - 1) out.push_back(es[std::countr_zero(bits)]);
    return SteinerForest(std::move(out));
}

// Decision variant: is there a feasible forest with at most budget edges?
inline bool solve_decision(const Graph& g, const TerminalSet& t, int budget) {
    if (t.empty()) return budget >= 0;
    int opt = detail::exact_forest_size(g, t);
    return opt >= 0 && opt <= budget;
}

}  // namespace steiner
