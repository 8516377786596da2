#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <vector>

#include "graph.hpp"
#include "terminals.hpp"

namespace steiner {

// --- dominated non-terminal removal ---------------------------------------
//
// A non-terminal x whose neighbourhood is a strict subset of another vertex's
// can be rerouted through that vertex, so deleting x preserves the optimum.

struct DominationReduction {
    Subgraph sub;          // reduced graph plus the relabelling
    TerminalSet terminals; // input pairs in reduced ids
    std::vector<int> removed;  // original ids, in removal order
};

inline DominationReduction remove_dominated(const Graph& g, const TerminalSet& t) {
    int n = g.vertex_count();
    std::vector<char> is_terminal(n, 0);
    for (int v : t.terminal_vertices()) is_terminal[v] = 1;
    std::vector<char> alive(n, 1);
    std::vector<int> removed;

    auto live_neighbors = [&](int v) {
        std::vector<int> out;
        for (int w : g.neighbors(v))
            if (alive[w]) out.push_back(w);
        return out;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (int x = 0; x < n && !changed; ++x) {
            if (!alive[x] || is_terminal[x]) continue;
            auto nx = live_neighbors(x);
            for (int y = 0; y < n; ++y) {
                if (y == x || !alive[y]) continue;
                auto ny = live_neighbors(y);
                if (nx.size() >= ny.size()) continue;
                if (std::includes(ny.begin(), ny.end(), nx.begin(), nx.end())) {
                    alive[x] = 0;
                    removed.push_back(x);
                    changed = true;
                    break;
                }
            }
        }
    }

    std::vector<int> keep;
    for (int v = 0; v < n; ++v)
        if (alive[v]) keep.push_back(v);
    DominationReduction out;
    out.sub = induced_subgraph(g, keep);
    out.terminals = t.relabel(out.sub.new_id);
    out.removed = std::move(removed);
    return out;
}

// --- terminal edge contraction --------------------------------------------
//
// A demand pair joined by an edge can take that edge; contract it and lower
// the budget. Applied once per call; nullopt when no pair is an edge.

struct ContractionStep {
    Identification ident;
    TerminalSet terminals;  // projected pairs, the contracted one removed
    Edge contracted;        // original edge
    int budget = 0;
};

inline std::optional<ContractionStep> contract_terminal_edge(const Graph& g,
                                                             const TerminalSet& t,
                                                             int budget) {
    for (const auto& [s, u] : t.pairs()) {
        if (!g.has_edge(s, u)) continue;
        ContractionStep step;
        step.ident = identify_set(g, {s, u});
        step.terminals = t.relabel(step.ident.vertex_map);
        step.contracted = make_edge(s, u);
        step.budget = budget - 1;
        return step;
    }
    return std::nullopt;
}

// --- seeded wedge rewrite --------------------------------------------------
//
// A pair a,b with an edge between them, both adjacent to exactly {x,y} and
// nothing else, forms the one two-vertex wedge interior whose closure is K4.
// Deleting one edge never hurts an optimal forest: if the pair is itself a
// demand, drop a's edge to the smaller end, otherwise drop ab.

struct WedgeTransformResult {
    Graph graph;
    std::vector<Edge> deleted;  // in deletion order
};

namespace detail {

// Find the lexicographically smallest (a, b) forming the K4 signature.
inline std::optional<std::array<int, 4>> find_seeded_signature(const Graph& g) {
    for (int a = 0; a < g.vertex_count(); ++a) {
        if (g.degree(a) != 3) continue;
        for (int b : g.neighbors(a)) {
            if (b <= a || g.degree(b) != 3) continue;
            // N(a) = {b, x, y}, N(b) = {a, x, y}
            std::vector<int> xa, xb;
            for (int w : g.neighbors(a))
                if (w != b) xa.push_back(w);
            for (int w : g.neighbors(b))
                if (w != a) xb.push_back(w);
            if (xa != xb) continue;
            return std::array<int, 4>{a, b, xa[0], xa[1]};  // xa sorted: x < y
        }
    }
    return std::nullopt;
}

}  // namespace detail

inline WedgeTransformResult wedge_transform(const Graph& g, const TerminalSet& t) {
    WedgeTransformResult out;
    out.graph = g;
    while (auto sig = detail::find_seeded_signature(out.graph)) {
        auto [a, b, x, y] = *sig;
        Edge victim = t.contains(a, b) ? make_edge(a, x) : make_edge(a, b);
        out.graph = out.graph.without_edge(victim.first, victim.second);
        out.deleted.push_back(victim);
    }
    return out;
}

// --- block splitting --------------------------------------------------------
//
// Demands decompose along the block-cut tree: a pair routes through the
// unique sequence of cut vertices between its endpoints, leaving one
// independent subproblem per block.

struct BlockInstance {
    Subgraph sub;
    TerminalSet terminals;  // in block-local ids
};

inline std::vector<BlockInstance> split_blocks(const Graph& g, const TerminalSet& t) {
    // Demands across components are hopeless; catch that first.
    {
        auto comps = connected_components(g);
        std::vector<int> comp_of(g.vertex_count(), -1);
        for (int i = 0; i < static_cast<int>(comps.size()); ++i)
            for (int v : comps[i]) comp_of[v] = i;
        for (auto [s, u] : t.pairs())
            if (comp_of[s] != comp_of[u])
                throw InfeasibleError("terminal pair split across components");
    }

    auto blocks = biconnected_components(g);
    int nb = static_cast<int>(blocks.block_vertices.size());

    // Block-cut tree: nodes 0..nb-1 are blocks, then one node per cut vertex.
    std::vector<char> is_cut(g.vertex_count(), 0);
    std::vector<int> cut_node(g.vertex_count(), -1);
    int nodes = nb;
    for (int v : blocks.cut_vertices) {
        is_cut[v] = 1;
        cut_node[v] = nodes++;
    }
    std::vector<std::vector<int>> tree(nodes);
    std::vector<int> home_block(g.vertex_count(), -1);  // for non-cut vertices
    for (int b = 0; b < nb; ++b)
        for (int v : blocks.block_vertices[b]) {
            if (is_cut[v]) {
                tree[b].push_back(cut_node[v]);
                tree[cut_node[v]].push_back(b);
            } else {
                home_block[v] = b;
            }
        }

    auto node_of = [&](int v) { return is_cut[v] ? cut_node[v] : home_block[v]; };

    std::vector<std::vector<Edge>> block_pairs(nb);
    for (auto [s, u] : t.pairs()) {
        int from = node_of(s), to = node_of(u);
        // BFS path in the block-cut tree.
        std::vector<int> prev(nodes, -2);
        std::vector<int> queue{from};
        prev[from] = -1;
        for (size_t qi = 0; qi < queue.size() && prev[to] == -2; ++qi)
            for (int w : tree[queue[qi]])
                if (prev[w] == -2) {
                    prev[w] = queue[qi];
                    queue.push_back(w);
                }
        std::vector<int> path;
        for (int at = to; at != -1; at = prev[at]) path.push_back(at);
        std::reverse(path.begin(), path.end());
        // Walk the path; emit one sub-pair per block node passed through.
        int attach = s;
        for (size_t i = 0; i < path.size(); ++i) {
            if (path[i] >= nb) continue;  // cut-vertex node
            int b = path[i];
            int next = u;
            if (i + 1 < path.size()) {
                // following node is a cut vertex
                int cn = path[i + 1];
                for (int v : blocks.block_vertices[b])
                    if (is_cut[v] && cut_node[v] == cn) next = v;
            }
            if (attach != next) block_pairs[b].push_back(make_edge(attach, next));
            attach = next;
        }
    }

    std::vector<BlockInstance> out;
    for (int b = 0; b < nb; ++b) {
        BlockInstance inst;
        inst.sub = induced_subgraph(g, blocks.block_vertices[b]);
        inst.terminals = TerminalSet(std::move(block_pairs[b])).relabel(inst.sub.new_id);
        out.push_back(std::move(inst));
    }
    return out;
}

}  // namespace steiner
