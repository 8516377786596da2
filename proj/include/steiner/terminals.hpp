#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "graph.hpp"

namespace steiner {

// Unordered terminal pairs, normalized: s < t per pair, pairs sorted, no
// duplicates. A pair with s == t is meaningless and rejected.
class TerminalSet {
public:
    TerminalSet() = default;

    explicit TerminalSet(std::vector<Edge> pairs) {
        for (auto& p : pairs) {
            if (p.first == p.second)
                throw std::invalid_argument("terminal pair with equal endpoints");
            p = make_edge(p.first, p.second);
        }
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
        pairs_ = std::move(pairs);
    }

    const std::vector<Edge>& pairs() const { return pairs_; }
    bool empty() const { return pairs_.empty(); }
    int size() const { return static_cast<int>(pairs_.size()); }

    bool contains(int s, int t) const {
        return std::binary_search(pairs_.begin(), pairs_.end(), make_edge(s, t));
    }

    // Sorted list of all vertices that appear in some pair.
    std::vector<int> terminal_vertices() const {
        std::vector<int> out;
        for (auto [s, t] : pairs_) {
            out.push_back(s);
            out.push_back(t);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    int max_vertex() const {
        int m = -1;
        for (auto [s, t] : pairs_) m = std::max(m, t);
        return m;
    }

    // Apply a vertex relabelling; map[v] < 0 is allowed only for vertices that
    // appear in no pair. Pairs collapsing to a single vertex are dropped.
    TerminalSet relabel(const std::vector<int>& map) const {
        std::vector<Edge> out;
        for (auto [s, t] : pairs_) {
            int ns = map[s], nt = map[t];
            if (ns < 0 || nt < 0)
                throw std::invalid_argument("terminal vertex dropped by relabelling");
            if (ns == nt) continue;
            out.push_back(make_edge(ns, nt));
        }
        return TerminalSet(std::move(out));
    }

    // Keep only pairs with both endpoints in the given set, relabelled by the
    // subgraph's new ids.
    TerminalSet restrict_to(const Subgraph& s) const {
        std::vector<Edge> out;
        for (auto [a, b] : pairs_)
            if (s.new_id[a] >= 0 && s.new_id[b] >= 0)
                out.push_back(make_edge(s.new_id[a], s.new_id[b]));
        return TerminalSet(std::move(out));
    }

    TerminalSet merged_with(const TerminalSet& other) const {
        auto ps = pairs_;
        ps.insert(ps.end(), other.pairs_.begin(), other.pairs_.end());
        return TerminalSet(std::move(ps));
    }

    bool operator==(const TerminalSet& other) const = default;

private:
    std::vector<Edge> pairs_;
};

// Transitive closure of the pair relation: connected components of the demand
// graph. Every school has at least two vertices. Parts are sorted internally
// and ordered by smallest member.
struct Schools {
    std::vector<std::vector<int>> parts;
    std::vector<int> school_of;  // vertex -> school index, -1 for non-terminals

    int count() const { return static_cast<int>(parts.size()); }
};

inline Schools schools(const TerminalSet& t, int n) {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (auto [s, u] : t.pairs()) parent[find(s)] = find(u);

    Schools out;
    out.school_of.assign(n, -1);
    std::vector<int> terminals = t.terminal_vertices();
    std::map<int, std::vector<int>> by_root;
    for (int v : terminals) by_root[find(v)].push_back(v);
    for (auto& [root, members] : by_root) {
        std::sort(members.begin(), members.end());
        for (int v : members) out.school_of[v] = out.count();
        out.parts.push_back(std::move(members));
    }
    std::sort(out.parts.begin(), out.parts.end());
    for (int i = 0; i < out.count(); ++i)
        for (int v : out.parts[i]) out.school_of[v] = i;
    return out;
}

// An acyclic edge set; the answer type of every solver.
struct SteinerForest {
    std::vector<Edge> edges;  // sorted, normalized

    SteinerForest() = default;
    explicit SteinerForest(std::vector<Edge> es) {
        for (auto& e : es) e = make_edge(e.first, e.second);
        std::sort(es.begin(), es.end());
        es.erase(std::unique(es.begin(), es.end()), es.end());
        edges = std::move(es);
    }

    int size() const { return static_cast<int>(edges.size()); }
    bool operator==(const SteinerForest& other) const = default;
};

// Forest subsets compare by size first, then lexicographically on the sorted
// edge list; used for deterministic tie-breaking everywhere.
inline bool forest_less(const std::vector<Edge>& a, const std::vector<Edge>& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

// Every edge must exist in g, the edge set must be acyclic, and each terminal
// pair must be connected by it.
inline bool is_valid_forest(const Graph& g, const TerminalSet& t, const std::vector<Edge>& es) {
    for (auto [u, v] : es)
        if (!g.has_edge(u, v)) return false;
    if (!is_acyclic(g.vertex_count(), es)) return false;
    std::vector<int> parent(g.vertex_count());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (auto [u, v] : es) parent[find(u)] = find(v);
    for (auto [s, u] : t.pairs())
        if (find(s) != find(u)) return false;
    return true;
}

}  // namespace steiner
