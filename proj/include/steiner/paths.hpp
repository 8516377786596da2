#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "graph.hpp"

namespace steiner {

// A simple path as its vertex sequence (consecutive entries adjacent).
struct PathEmbedding {
    std::vector<int> vertices;
    int length() const { return static_cast<int>(vertices.size()); }
};

// A cycle as its vertex sequence; the last entry is also adjacent to the
// first. Always at least 3 vertices.
struct CycleEmbedding {
    std::vector<int> vertices;
    int length() const { return static_cast<int>(vertices.size()); }
};

namespace detail {

// Exhaustive path search over vertex bitmasks, memoized. Only graphs with at
// most 64 vertices are supported; everything in this codebase that needs the
// routine operates far below that.
class PathSearch {
public:
    explicit PathSearch(const Graph& g) : g_(g) {
        if (g.vertex_count() > 64) throw TooLargeError("path search supports at most 64 vertices");
        nbr_.assign(g.vertex_count(), 0);
        for (int v = 0; v < g.vertex_count(); ++v)
            for (int w : g.neighbors(v)) nbr_[v] |= uint64_t(1) << w;
        memo_.assign(g.vertex_count(), {});
    }

    // Bit L of the result is set iff a simple path starting at u can visit
    // exactly L further vertices, all drawn from mask (mask excludes u).
    uint64_t length_bits(uint64_t mask, int u) {
        auto it = memo_[u].find(mask);
        if (it != memo_[u].end()) return it->second;
        uint64_t bits = 1;  // stop immediately
        uint64_t cand = nbr_[u] & mask;
        while (cand) {
            int v = std::countr_zero(cand);
            cand &= cand - 1;
            bits |= length_bits(mask & ~(uint64_t(1) << v), v) << 1;
        }
        memo_[u][mask] = bits;
        return bits;
    }

    const Graph& graph() const { return g_; }
    uint64_t nbr(int v) const { return nbr_[v]; }

private:
    const Graph& g_;
    std::vector<uint64_t> nbr_;
    std::vector<std::unordered_map<uint64_t, uint64_t>> memo_;
};

// Variant whose paths must stop at a neighbour of the root (for cycles).
class CyclePathSearch {
public:
    CyclePathSearch(const Graph& g, int root) : g_(g), root_mask_(0) {
        for (int w : g.neighbors(root)) root_mask_ |= uint64_t(1) << w;
        nbr_.assign(g.vertex_count(), 0);
        for (int v = 0; v < g.vertex_count(); ++v)
            for (int w : g.neighbors(v)) nbr_[v] |= uint64_t(1) << w;
        memo_.assign(g.vertex_count(), {});
    }

    // Bit L set iff a simple path from u over exactly L further vertices of
    // mask ends at a neighbour of the root.
    uint64_t length_bits(uint64_t mask, int u) {
        auto it = memo_[u].find(mask);
        if (it != memo_[u].end()) return it->second;
        uint64_t bits = (root_mask_ >> u) & 1 ? 1 : 0;
        uint64_t cand = nbr_[u] & mask;
        while (cand) {
            int v = std::countr_zero(cand);
            cand &= cand - 1;
            bits |= length_bits(mask & ~(uint64_t(1) << v), v) << 1;
        }
        memo_[u][mask] = bits;
        return bits;
    }

private:
    const Graph& g_;
    uint64_t root_mask_;
    std::vector<uint64_t> nbr_;
    std::vector<std::unordered_map<uint64_t, uint64_t>> memo_;
};

inline int top_bit(uint64_t x) { return 63 - std::countl_zero(x); }

}  // namespace detail

// Longest simple path; among optima, the lexicographically smallest vertex
// sequence. Exhaustive search, so meant for small graphs.
inline PathEmbedding longest_path(const Graph& g) {
    if (g.vertex_count() == 0) return {};
    detail::PathSearch search(g);
    uint64_t all = g.vertex_count() == 64 ? ~uint64_t(0)
                                          : (uint64_t(1) << g.vertex_count()) - 1;
    int best = 0, start = 0;
    for (int v = 0; v < g.vertex_count(); ++v) {
        int len = detail::top_bit(search.length_bits(all & ~(uint64_t(1) << v), v));
        if (len > best) {
            best = len;
            start = v;
        }
    }
    PathEmbedding out;
    out.vertices.push_back(start);
    uint64_t mask = all & ~(uint64_t(1) << start);
    int u = start, remaining = best;
    while (remaining > 0) {
        for (int v : g.neighbors(u)) {
            if (!((mask >> v) & 1)) continue;
            uint64_t bits = search.length_bits(mask & ~(uint64_t(1) << v), v);
            if ((bits >> (remaining - 1)) & 1) {
                out.vertices.push_back(v);
                mask &= ~(uint64_t(1) << v);
                u = v;
                --remaining;
                break;
            }
        }
    }
    return out;
}

// Longest cycle, if any; among optima, the lexicographically smallest vertex
// sequence (which therefore starts at the smallest vertex of the cycle).
inline std::optional<CycleEmbedding> longest_cycle(const Graph& g) {
    if (g.vertex_count() > 64) throw TooLargeError("cycle search supports at most 64 vertices");
    int n = g.vertex_count();
    int best = 0, best_root = -1;
    // The root is the smallest vertex of the cycle, so only larger vertices
    // may appear on it.
    for (int r = 0; r < n; ++r) {
        uint64_t allowed = 0;
        for (int v = r + 1; v < n; ++v) allowed |= uint64_t(1) << v;
        detail::CyclePathSearch search(g, r);
        for (int a : g.neighbors(r)) {
            if (a <= r) continue;
            uint64_t bits = search.length_bits(allowed & ~(uint64_t(1) << a), a);
            bits &= ~uint64_t(1);  // r-a-r is not a cycle
            if (bits) {
                int len = 2 + detail::top_bit(bits);
                if (len > best) {
                    best = len;
                    best_root = r;
                }
            }
        }
    }
    if (best < 3) return std::nullopt;

    int r = best_root;
    uint64_t allowed = 0;
    for (int v = r + 1; v < g.vertex_count(); ++v) allowed |= uint64_t(1) << v;
    detail::CyclePathSearch search(g, r);
    CycleEmbedding out;
    out.vertices.push_back(r);
    // Greedy reconstruction of the smallest sequence achieving the optimum.
    int remaining = best - 1;  // vertices still to place
    int u = r;
    uint64_t mask = allowed;
    while (remaining > 0) {
        for (int v : g.neighbors(u)) {
            if (!((mask >> v) & 1)) continue;
            uint64_t bits = search.length_bits(mask & ~(uint64_t(1) << v), v);
            if (u == r) bits &= ~uint64_t(1);
            if ((bits >> (remaining - 1)) & 1) {
                out.vertices.push_back(v);
                mask &= ~(uint64_t(1) << v);
                u = v;
                --remaining;
                break;
            }
        }
    }
    return out;
}

}  // namespace steiner
