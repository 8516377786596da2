#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace steiner {

// Undirected edge, stored with u < v.
using Edge = std::pair<int, int>;

inline Edge make_edge(int u, int v) { return u < v ? Edge{u, v} : Edge{v, u}; }

// Simple undirected graph on vertices 0..n-1. Immutable after construction;
// transformations return fresh graphs plus whatever relabelling data callers
// need to map results back.
class Graph {
public:
    Graph() = default;

    Graph(int n, std::vector<Edge> edges) : n_(n) {
        if (n < 0) throw std::invalid_argument("negative vertex count");
        for (auto& e : edges) {
            if (e.first == e.second) throw std::invalid_argument("self-loop");
            if (e.first < 0 || e.second < 0 || e.first >= n || e.second >= n)
                throw std::invalid_argument("edge endpoint out of range");
            e = make_edge(e.first, e.second);
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        edges_ = std::move(edges);
        adj_.assign(n_, {});
        for (const auto& [u, v] : edges_) {
            adj_[u].push_back(v);
            adj_[v].push_back(u);
        }
        for (auto& row : adj_) std::sort(row.begin(), row.end());
    }

    int vertex_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int v) const { return adj_[v]; }
    int degree(int v) const { return static_cast<int>(adj_[v].size()); }

    bool has_edge(int u, int v) const {
        if (u < 0 || v < 0 || u >= n_ || v >= n_ || u == v) return false;
        const auto& row = adj_[u];
        return std::binary_search(row.begin(), row.end(), v);
    }

    Graph with_edge(int u, int v) const {
        auto es = edges_;
        es.push_back(make_edge(u, v));
        return Graph(n_, std::move(es));
    }

    Graph without_edge(int u, int v) const {
        auto es = edges_;
        Edge e = make_edge(u, v);
        es.erase(std::remove(es.begin(), es.end(), e), es.end());
        return Graph(n_, std::move(es));
    }

    Graph without_edges(const std::vector<Edge>& drop) const {
        std::vector<Edge> norm;
        norm.reserve(drop.size());
        for (auto [u, v] : drop) norm.push_back(make_edge(u, v));
        std::sort(norm.begin(), norm.end());
        std::vector<Edge> es;
        es.reserve(edges_.size());
        for (const auto& e : edges_)
            if (!std::binary_search(norm.begin(), norm.end(), e)) es.push_back(e);
        return Graph(n_, std::move(es));
    }

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adj_;
};

// Induced subgraph together with the relabelling used to build it.
// vertices[i] is the original id of new vertex i.
struct Subgraph {
    Graph graph;
    std::vector<int> vertices;       // new id -> old id, strictly increasing
    std::vector<int> new_id;         // old id -> new id, -1 if dropped

    Edge lift(Edge e) const { return make_edge(vertices[e.first], vertices[e.second]); }

    std::vector<Edge> lift(const std::vector<Edge>& es) const {
        std::vector<Edge> out;
        out.reserve(es.size());
        for (auto e : es) out.push_back(lift(e));
        std::sort(out.begin(), out.end());
        return out;
    }
};

inline Subgraph induced_subgraph(const Graph& g, std::vector<int> keep) {
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    Subgraph s;
    s.vertices = keep;
    s.new_id.assign(g.vertex_count(), -1);
    for (int i = 0; i < static_cast<int>(keep.size()); ++i) s.new_id[keep[i]] = i;
    std::vector<Edge> es;
    for (const auto& [u, v] : g.edges())
        if (s.new_id[u] >= 0 && s.new_id[v] >= 0)
            es.emplace_back(s.new_id[u], s.new_id[v]);
    s.graph = Graph(static_cast<int>(keep.size()), std::move(es));
    return s;
}

inline Subgraph remove_vertices(const Graph& g, const std::vector<int>& drop) {
    std::vector<char> gone(g.vertex_count(), 0);
    for (int v : drop) gone[v] = 1;
    std::vector<int> keep;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (!gone[v]) keep.push_back(v);
    return induced_subgraph(g, keep);
}

// Connected components as sorted vertex lists, ordered by smallest member.
inline std::vector<std::vector<int>> connected_components(const Graph& g) {
    int n = g.vertex_count();
    std::vector<int> comp(n, -1);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        int id = static_cast<int>(out.size());
        std::vector<int> stack{s}, members;
        comp[s] = id;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (int w : g.neighbors(v))
                if (comp[w] < 0) {
                    comp[w] = id;
                    stack.push_back(w);
                }
        }
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    return out;
}

inline bool is_connected(const Graph& g) {
    return g.vertex_count() <= 1 || connected_components(g).size() == 1;
}

// Components of g - removed, reported as sorted vertex lists.
inline std::vector<std::vector<int>> components_after_removal(const Graph& g,
                                                             const std::vector<int>& removed) {
    std::vector<char> gone(g.vertex_count(), 0);
    for (int v : removed) gone[v] = 1;
    std::vector<int> comp(g.vertex_count(), -1);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < g.vertex_count(); ++s) {
        if (gone[s] || comp[s] >= 0) continue;
        int id = static_cast<int>(out.size());
        std::vector<int> stack{s}, members;
        comp[s] = id;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (int w : g.neighbors(v))
                if (!gone[w] && comp[w] < 0) {
                    comp[w] = id;
                    stack.push_back(w);
                }
        }
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    return out;
}

// Neighbourhood of a vertex set, excluding the set itself. Sorted.
inline std::vector<int> neighborhood(const Graph& g, const std::vector<int>& set) {
    std::vector<char> inside(g.vertex_count(), 0);
    for (int v : set) inside[v] = 1;
    std::vector<int> out;
    for (int v : set)
        for (int w : g.neighbors(v))
            if (!inside[w]) out.push_back(w);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Blocks (biconnected components) and cut vertices. A block is given by its
// sorted vertex set and its edge list; a bridge is a block with one edge.
struct BlockDecomposition {
    std::vector<std::vector<int>> block_vertices;
    std::vector<std::vector<Edge>> block_edges;
    std::vector<int> cut_vertices;  // sorted
};

inline BlockDecomposition biconnected_components(const Graph& g) {
    int n = g.vertex_count();
    std::vector<int> num(n, -1), low(n, 0);
    std::vector<char> is_cut(n, 0);
    std::vector<Edge> edge_stack;
    std::vector<std::vector<Edge>> blocks;
    int timer = 0;

    // Iterative DFS; per-vertex iterator index into the adjacency list.
    struct Frame {
        int v, parent;
        size_t idx;
    };
    for (int root = 0; root < n; ++root) {
        if (num[root] >= 0) continue;
        std::vector<Frame> stack{{root, -1, 0}};
        num[root] = low[root] = timer++;
        int root_children = 0;
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.idx < g.neighbors(f.v).size()) {
                int w = g.neighbors(f.v)[f.idx++];
                if (w == f.parent) continue;
                if (num[w] < 0) {
                    edge_stack.push_back(make_edge(f.v, w));
                    num[w] = low[w] = timer++;
                    if (f.v == root) ++root_children;
                    stack.push_back({w, f.v, 0});
                } else if (num[w] < num[f.v]) {
                    edge_stack.push_back(make_edge(f.v, w));
                    low[f.v] = std::min(low[f.v], num[w]);
                }
            } else {
                int v = f.v, parent = f.parent;
                stack.pop_back();
                if (parent >= 0) {
                    low[parent] = std::min(low[parent], low[v]);
                    if (low[v] >= num[parent]) {
                        // Pop the block whose top edge is (parent, v).
                        std::vector<Edge> block;
                        Edge top = make_edge(parent, v);
                        while (!edge_stack.empty()) {
                            Edge e = edge_stack.back();
                            edge_stack.pop_back();
                            block.push_back(e);
                            if (e == top) break;
                        }
                        if (!block.empty()) blocks.push_back(std::move(block));
                        if (parent != root) is_cut[parent] = 1;
                    }
                }
            }
        }
        if (root_children > 1) is_cut[root] = 1;
    }

    BlockDecomposition out;
    for (auto& block : blocks) {
        std::sort(block.begin(), block.end());
        std::vector<int> vs;
        for (auto [u, v] : block) {
            vs.push_back(u);
            vs.push_back(v);
        }
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        out.block_vertices.push_back(std::move(vs));
        out.block_edges.push_back(std::move(block));
    }
    // Isolated vertices form their own single-vertex blocks.
    for (int v = 0; v < n; ++v)
        if (g.degree(v) == 0) {
            out.block_vertices.push_back({v});
            out.block_edges.push_back({});
        }
    // Deterministic order: by smallest vertex, then size, then contents.
    std::vector<size_t> order(out.block_vertices.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return out.block_vertices[a] < out.block_vertices[b];
    });
    BlockDecomposition sorted;
    for (size_t i : order) {
        sorted.block_vertices.push_back(std::move(out.block_vertices[i]));
        sorted.block_edges.push_back(std::move(out.block_edges[i]));
    }
    for (int v = 0; v < n; ++v)
        if (is_cut[v]) sorted.cut_vertices.push_back(v);
    return sorted;
}

// Result of merging a vertex set into a single vertex. Parallel edges
// collapse and internal edges vanish; each surviving edge remembers the
// lexicographically smallest original edge it came from.
struct Identification {
    Graph graph;
    int merged = -1;               // new id of the merged vertex
    std::vector<int> vertex_map;   // old id -> new id
    std::map<Edge, Edge> edge_origin;  // new edge -> original edge

    Edge lift(Edge e) const { return edge_origin.at(e); }

    std::vector<Edge> lift(const std::vector<Edge>& es) const {
        std::vector<Edge> out;
        out.reserve(es.size());
        for (auto e : es) out.push_back(lift(e));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

inline Identification identify_set(const Graph& g, std::vector<int> d) {
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    if (d.empty()) throw std::invalid_argument("identify_set: empty set");
    for (int v : d)
        if (v < 0 || v >= g.vertex_count())
            throw std::invalid_argument("identify_set: vertex out of range");

    std::vector<char> in_d(g.vertex_count(), 0);
    for (int v : d) in_d[v] = 1;

    Identification out;
    out.vertex_map.assign(g.vertex_count(), -1);
    int next = 0;
    for (int v = 0; v < g.vertex_count(); ++v) {
        if (in_d[v]) {
            if (v == d.front()) {
                out.merged = next;
                out.vertex_map[v] = next++;
            }
        } else {
            out.vertex_map[v] = next++;
        }
    }
    for (int v : d) out.vertex_map[v] = out.merged;

    std::vector<Edge> es;
    for (const auto& [u, v] : g.edges()) {
        int nu = out.vertex_map[u], nv = out.vertex_map[v];
        if (nu == nv) continue;  // internal edge of d, or d is a single vertex
        Edge ne = make_edge(nu, nv);
        auto it = out.edge_origin.find(ne);
        if (it == out.edge_origin.end()) {
            out.edge_origin[ne] = Edge{u, v};
            es.push_back(ne);
        }
        // Edges are scanned in sorted order, so the first origin seen is the
        // lexicographically smallest one.
    }
    out.graph = Graph(next, std::move(es));
    return out;
}

// Spanning forest of the subgraph formed by the given edges, one spanning
// tree per connected component, chosen greedily in sorted edge order.
inline std::vector<Edge> spanning_forest(int n, std::vector<Edge> es) {
    std::sort(es.begin(), es.end());
    es.erase(std::unique(es.begin(), es.end()), es.end());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    std::vector<Edge> out;
    for (const auto& [u, v] : es) {
        int ru = find(u), rv = find(v);
        if (ru == rv) continue;
        parent[ru] = rv;
        out.emplace_back(u, v);
    }
    return out;
}

inline bool is_acyclic(int n, const std::vector<Edge>& es) {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const auto& [u, v] : es) {
        int ru = find(u), rv = find(v);
        if (ru == rv) return false;
        parent[ru] = rv;
    }
    return true;
}

}  // namespace steiner
