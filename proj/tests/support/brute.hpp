#pragma once

// Independent reference implementations used only by tests. Everything here
// is deliberately naive: results are compared against the library, so these
// must not share code with it.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "steiner/graph.hpp"
#include "steiner/terminals.hpp"

namespace brute {

using steiner::Edge;
using steiner::Graph;
using steiner::TerminalSet;

// Treewidth by the elimination-order subset DP. Only for tiny graphs.
inline int treewidth(const Graph& g) {
    int n = g.vertex_count();
    if (n == 0) return -1;
    if (n > 16) throw std::invalid_argument("brute treewidth capped at 16 vertices");
    std::vector<uint32_t> nbr(n, 0);
    for (int v = 0; v < n; ++v)
        for (int w : g.neighbors(v)) nbr[v] |= uint32_t(1) << w;
    uint32_t full = (n == 32) ? ~uint32_t(0) : (uint32_t(1) << n) - 1;
    std::vector<int8_t> dp(size_t(1) << n, 0);
    // dp[S] = best over orders eliminating exactly S first, of the max
    // back-degree seen; Q(v, S) = vertices outside S∪{v} reachable from v
    // through S.
    for (uint32_t s = 1; s <= full; ++s) {
        int best = 127;
        for (uint32_t bits = s; bits; bits &= bits - 1) {
            int v = std::countr_zero(bits);
            uint32_t prior = s & ~(uint32_t(1) << v);
            // reachable set of v through prior
            uint32_t seen = uint32_t(1) << v, frontier = seen, q = 0;
            while (frontier) {
                uint32_t next = 0;
                while (frontier) {
                    int u = std::countr_zero(frontier);
                    frontier &= frontier - 1;
                    uint32_t reach = nbr[u];
                    q |= reach & ~prior & ~(uint32_t(1) << v);
                    next |= reach & prior & ~seen;
                }
                seen |= next;
                frontier = next;
            }
            int cand = std::max(dp[prior], static_cast<int8_t>(std::popcount(q)));
            best = std::min(best, cand);
        }
        dp[s] = static_cast<int8_t>(best);
        if (s == full) break;
    }
    return dp[full];
}

// Minimum Steiner forest size by brute force over edge subsets; -1 when
// infeasible. Caller keeps the edge count small.
inline int steiner_forest_size(const Graph& g, const TerminalSet& t) {
    if (t.empty()) return 0;
    int m = g.edge_count(), n = g.vertex_count();
    const auto& es = g.edges();
    int best = -1;
    for (uint32_t mask = 0; mask < (uint32_t(1) << m); ++mask) {
        int size = std::popcount(mask);
        if (best >= 0 && size >= best) continue;
        std::vector<int> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        for (uint32_t bits = mask; bits; bits &= bits - 1) {
            auto [u, v] = es[std::countr_zero(bits)];
            parent[find(u)] = find(v);
        }
        bool ok = true;
        for (auto [s, u] : t.pairs())
            if (find(s) != find(u)) {
                ok = false;
                break;
            }
        if (ok) best = size;
    }
    return best;
}

// All simple paths enumerated; longest length in vertices.
inline int longest_path_vertices(const Graph& g) {
    int n = g.vertex_count();
    int best = 0;
    std::vector<char> used(n, 0);
    std::vector<int> stack;
    auto dfs = [&](auto&& self, int v) -> void {
        best = std::max(best, static_cast<int>(stack.size()));
        for (int w : g.neighbors(v)) {
            if (used[w]) continue;
            used[w] = 1;
            stack.push_back(w);
            self(self, w);
            stack.pop_back();
            used[w] = 0;
        }
    };
    for (int v = 0; v < n; ++v) {
        used[v] = 1;
        stack.push_back(v);
        dfs(dfs, v);
        stack.pop_back();
        used[v] = 0;
    }
    return best;
}

// Longest cycle length in vertices, 0 if acyclic.
inline int longest_cycle_vertices(const Graph& g) {
    int n = g.vertex_count();
    int best = 0;
    std::vector<char> used(n, 0);
    auto dfs = [&](auto&& self, int root, int v, int depth) -> void {
        for (int w : g.neighbors(v)) {
            if (w == root && depth >= 3) best = std::max(best, depth);
            if (w <= root || used[w]) continue;
            used[w] = 1;
            self(self, root, w, depth + 1);
            used[w] = 0;
        }
    };
    for (int root = 0; root < n; ++root) {
        used[root] = 1;
        dfs(dfs, root, root, 1);
        used[root] = 0;
    }
    return best;
}

// Vertex-disjoint subgraph embedding test by raw backtracking over injective
// maps needle -> host, for validating the pattern searcher.
inline bool embeds(const Graph& needle, const Graph& host) {
    int k = needle.vertex_count(), n = host.vertex_count();
    if (k > n) return false;
    std::vector<int> map(k, -1);
    std::vector<char> used(n, 0);
    auto dfs = [&](auto&& self, int i) -> bool {
        if (i == k) return true;
        for (int cand = 0; cand < n; ++cand) {
            if (used[cand] || host.degree(cand) < needle.degree(i)) continue;
            bool ok = true;
            for (int j = 0; j < i && ok; ++j)
                if (needle.has_edge(i, j) && !host.has_edge(cand, map[j])) ok = false;
            if (!ok) continue;
            map[i] = cand;
            used[cand] = 1;
            if (self(self, i + 1)) return true;
            used[cand] = 0;
            map[i] = -1;
        }
        return false;
    };
    return dfs(dfs, 0);
}

}  // namespace brute
