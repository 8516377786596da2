#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "terminals.hpp"

namespace steiner {

// Nice tree decomposition of width <= 2. Nodes are stored children-first;
// node(root_index) has an empty bag, as do leaves. Every graph edge is
// activated by exactly one IntroduceEdge node whose bag holds both ends.
struct NiceDecomposition {
    enum class Kind { Leaf, IntroduceVertex, IntroduceEdge, Forget, Join };
    struct Node {
        Kind kind;
        std::vector<int> bag;  // sorted original vertex ids, size <= 3
        int vertex = -1;       // IntroduceVertex / Forget
        Edge edge{-1, -1};     // IntroduceEdge
        int child = -1;
        int child2 = -1;  // Join only
    };
    std::vector<Node> nodes;
    int root_index = -1;
};

namespace detail {

// Peel vertices of degree <= 2, smallest id first; degree-2 removal adds a
// fill edge between the two neighbours. Succeeds exactly on graphs of
// treewidth <= 2: the peeled graph is always a minor, and a stuck nonempty
// remainder has minimum degree 3.
struct Elimination {
    std::vector<int> order;
    std::vector<std::vector<int>> nbrs;  // sorted, at elimination time
};

inline std::optional<Elimination> eliminate_tw2(const Graph& g) {
    int n = g.vertex_count();
    std::vector<std::set<int>> adj(n);
    for (auto [u, w] : g.edges()) {
        adj[u].insert(w);
        adj[w].insert(u);
    }
    std::vector<char> gone(n, 0);
    Elimination e;
    for (int round = 0; round < n; ++round) {
        int pick = -1;
        for (int v = 0; v < n; ++v)
            if (!gone[v] && adj[v].size() <= 2) {
                pick = v;
                break;
            }
        if (pick < 0) return std::nullopt;
        std::vector<int> nb(adj[pick].begin(), adj[pick].end());
        if (nb.size() == 2) {
            adj[nb[0]].insert(nb[1]);
            adj[nb[1]].insert(nb[0]);
        }
        for (int w : nb) adj[w].erase(pick);
        adj[pick].clear();
        gone[pick] = 1;
        e.order.push_back(pick);
        e.nbrs.push_back(std::move(nb));
    }
    return e;
}

// Rebuild a decomposition from the elimination records: bag(v) = {v} + its
// elimination neighbours, attached under the neighbour peeled first. The
// nice form threads forget/introduce chains between those bags.
inline NiceDecomposition build_nice(const Graph& g, const Elimination& e) {
    int n = g.vertex_count();
    std::vector<int> pos(n, -1);
    for (int i = 0; i < n; ++i) pos[e.order[i]] = i;

    std::vector<std::vector<int>> kids(n);
    std::vector<int> roots;
    for (int i = 0; i < n; ++i) {
        int v = e.order[i];
        if (e.nbrs[i].empty()) {
            roots.push_back(v);
        } else {
            int p = e.nbrs[i][0];
            for (int w : e.nbrs[i])
                if (pos[w] < pos[p]) p = w;
            kids[p].push_back(v);  // filled in elimination order
        }
    }

    std::vector<std::vector<Edge>> owed(n);  // edges by earlier-peeled end
    for (Edge uw : g.edges()) {
        int u = pos[uw.first] < pos[uw.second] ? uw.first : uw.second;
        owed[u].push_back(uw);
    }

    NiceDecomposition d;
    using Kind = NiceDecomposition::Kind;
    auto add = [&](NiceDecomposition::Node nd) {
        d.nodes.push_back(std::move(nd));
        return static_cast<int>(d.nodes.size()) - 1;
    };
    auto chain_to = [&](int top, const std::vector<int>& target) {
        const std::vector<int> start = d.nodes[top].bag;  // add() may reallocate
        auto cur = start;
        for (int v : start)
            if (!std::binary_search(target.begin(), target.end(), v)) {
                cur.erase(std::find(cur.begin(), cur.end(), v));
                top = add({Kind::Forget, cur, v, {-1, -1}, top, -1});
            }
        for (int v : target)
            if (!std::binary_search(cur.begin(), cur.end(), v)) {
                cur.insert(std::upper_bound(cur.begin(), cur.end(), v), v);
                top = add({Kind::IntroduceVertex, cur, v, {-1, -1}, top, -1});
            }
        return top;
    };

    std::vector<int> top(n, -1);
    for (int i = 0; i < n; ++i) {
        int v = e.order[i];
        std::vector<int> bag = e.nbrs[i];
        bag.insert(std::upper_bound(bag.begin(), bag.end(), v), v);
        std::vector<int> parts;
        for (int c : kids[v]) parts.push_back(chain_to(top[c], bag));
        int t;
        if (parts.empty()) {
            t = chain_to(add({Kind::Leaf, {}, -1, {-1, -1}, -1, -1}), bag);
        } else {
            t = parts[0];
            for (size_t j = 1; j < parts.size(); ++j)
                t = add({Kind::Join, bag, -1, {-1, -1}, t, static_cast<int>(parts[j])});
        }
        for (Edge uw : owed[v])
            t = add({Kind::IntroduceEdge, bag, -1, uw, t, -1});
        top[v] = t;
    }

    std::vector<int> parts;
    for (int r : roots) parts.push_back(chain_to(top[r], {}));
    int t;
    if (parts.empty()) {
        t = add({Kind::Leaf, {}, -1, {-1, -1}, -1, -1});
    } else {
        t = parts[0];
        for (size_t j = 1; j < parts.size(); ++j)
            t = add({Kind::Join, {}, -1, {-1, -1}, t, static_cast<int>(parts[j])});
    }
    d.root_index = t;
    return d;
}

}  // namespace detail

inline std::optional<NiceDecomposition> recognize_tw2(const Graph& g) {
    auto e = detail::eliminate_tw2(g);
    if (!e) return std::nullopt;
    return detail::build_nice(g, *e);
}

inline bool treewidth_at_most_2(const Graph& g) {
    return detail::eliminate_tw2(g).has_value();
}

namespace detail {

// DP state over a bag: which bag vertices the forest uses, how the partial
// forest below groups them, and per group how much of each school it has
// swallowed. A group whose last bag vertex is forgotten must have completed
// every school it touched.
struct SpState {
    std::vector<int> present;                       // sorted original ids
    std::vector<int> block_of;                      // parallel, canonical labels
    std::vector<std::map<int, int>> school_count;   // per block: school -> vertices

    int blocks() const { return static_cast<int>(school_count.size()); }

    // Canonical labels: first occurrence order along `present`.
    void canonicalize() {
        std::vector<int> map(blocks(), -1);
        std::vector<std::map<int, int>> counts;
        int next = 0;
        for (int& b : block_of) {
            if (map[b] < 0) {
                map[b] = next++;
                counts.push_back(std::move(school_count[b]));
            }
            b = map[b];
        }
        school_count = std::move(counts);
    }

    std::vector<int> key() const {
        std::vector<int> k;
        for (size_t i = 0; i < present.size(); ++i) {
            k.push_back(present[i]);
            k.push_back(block_of[i]);
        }
        k.push_back(-1);
        for (const auto& m : school_count) {
            for (auto [s, c] : m) {
                k.push_back(s);
                k.push_back(c);
            }
            k.push_back(-2);
        }
        return k;
    }
};

struct SpEntry {
    SpState state;
    int value = 0;
    std::vector<Edge> edges;  // kept sorted
};

using SpTable = std::map<std::vector<int>, SpEntry>;

inline void sp_offer(SpTable& table, SpEntry entry) {
    auto k = entry.state.key();
    auto it = table.find(k);
    if (it == table.end()) {
        table.emplace(std::move(k), std::move(entry));
        return;
    }
    auto& cur = it->second;
    if (entry.value < cur.value ||
        (entry.value == cur.value && entry.edges < cur.edges))
        cur = std::move(entry);
}

inline void sp_add_edge(std::vector<Edge>& edges, Edge e) {
    edges.insert(std::upper_bound(edges.begin(), edges.end(), e), e);
}

}  // namespace detail

// Steiner forest on a graph of treewidth <= 2, by dynamic programming over
// the decomposition. Throws NotTw2Error when the graph is wider and
// InfeasibleError when some pair cannot be connected.
inline SteinerForest solve_tw2(const Graph& g, const TerminalSet& t) {
    if (t.max_vertex() >= g.vertex_count())
        throw std::invalid_argument("terminal outside graph");
    auto dec = recognize_tw2(g);
    if (!dec) throw NotTw2Error("graph has treewidth above 2");

    Schools sch = schools(t, g.vertex_count());
    const auto& school_of = sch.school_of;
    std::vector<int> sz;
    for (const auto& part : sch.parts) sz.push_back(static_cast<int>(part.size()));

    using detail::SpEntry;
    using detail::SpState;
    using detail::SpTable;
    using Kind = NiceDecomposition::Kind;

    std::vector<SpTable> tables(dec->nodes.size());
    for (size_t ni = 0; ni < dec->nodes.size(); ++ni) {
        const auto& node = dec->nodes[ni];
        SpTable& out = tables[ni];
        switch (node.kind) {
            case Kind::Leaf: {
                detail::sp_offer(out, SpEntry{});
                break;
            }
            case Kind::IntroduceVertex: {
                int v = node.vertex;
                bool is_term = school_of[v] >= 0;
                for (auto& [k, en] : tables[node.child]) {
                    if (!is_term) detail::sp_offer(out, en);
                    SpEntry added = en;
                    auto& st = added.state;
                    auto it = std::upper_bound(st.present.begin(), st.present.end(), v);
                    int at = static_cast<int>(it - st.present.begin());
                    st.present.insert(it, v);
                    st.block_of.insert(st.block_of.begin() + at, st.blocks());
                    st.school_count.emplace_back();
                    if (is_term) st.school_count.back()[school_of[v]] = 1;
                    st.canonicalize();
                    detail::sp_offer(out, std::move(added));
                }
                break;
            }
            case Kind::IntroduceEdge: {
                auto [u, w] = node.edge;
                for (auto& [k, en] : tables[node.child]) {
                    detail::sp_offer(out, en);
                    const auto& st = en.state;
                    auto iu = std::find(st.present.begin(), st.present.end(), u);
                    auto iw = std::find(st.present.begin(), st.present.end(), w);
                    if (iu == st.present.end() || iw == st.present.end()) continue;
                    int bu = st.block_of[iu - st.present.begin()];
                    int bw = st.block_of[iw - st.present.begin()];
                    if (bu == bw) continue;  // would close a cycle
                    SpEntry taken = en;
                    auto& ts = taken.state;
                    for (int& b : ts.block_of)
                        if (b == bw) b = bu;
                    for (auto [s, c] : ts.school_count[bw])
                        ts.school_count[bu][s] += c;
                    ts.school_count.erase(ts.school_count.begin() + bw);
                    for (int& b : ts.block_of)
                        if (b > bw) --b;
                    ts.canonicalize();
                    taken.value += 1;
                    detail::sp_add_edge(taken.edges, node.edge);
                    detail::sp_offer(out, std::move(taken));
                }
                break;
            }
            case Kind::Forget: {
                int v = node.vertex;
                for (auto& [k, en] : tables[node.child]) {
                    const auto& st = en.state;
                    auto iv = std::find(st.present.begin(), st.present.end(), v);
                    if (iv == st.present.end()) {
                        detail::sp_offer(out, en);
                        continue;
                    }
                    int at = static_cast<int>(iv - st.present.begin());
                    int b = st.block_of[at];
                    bool alone = std::count(st.block_of.begin(), st.block_of.end(), b) == 1;
                    if (alone) {
                        // the component detaches for good; every school it
                        // touched must be fully inside it
                        bool ok = true;
                        for (auto [s, c] : st.school_count[b])
                            if (c != sz[s]) ok = false;
                        if (!ok) continue;
                    }
                    SpEntry kept = en;
                    auto& ks = kept.state;
                    ks.present.erase(ks.present.begin() + at);
                    ks.block_of.erase(ks.block_of.begin() + at);
                    if (alone) {
                        ks.school_count.erase(ks.school_count.begin() + b);
                        for (int& x : ks.block_of)
                            if (x > b) --x;
                    }
                    ks.canonicalize();
                    detail::sp_offer(out, std::move(kept));
                }
                break;
            }
            case Kind::Join: {
                for (auto& [k1, e1] : tables[node.child]) {
                    for (auto& [k2, e2] : tables[node.child2]) {
                        const auto& s1 = e1.state;
                        const auto& s2 = e2.state;
                        if (s1.present != s2.present) continue;
                        int m = static_cast<int>(s1.present.size());
                        // union-find over bag positions, seeded with s1's
                        // blocks, then constrained by s2's; a repeat merge
                        // means the two forests close a cycle
                        std::vector<int> uf(m);
                        for (int i = 0; i < m; ++i) uf[i] = i;
                        auto find = [&](int x) {
                            while (uf[x] != x) x = uf[x] = uf[uf[x]];
                            return x;
                        };
                        auto glue = [&](const std::vector<int>& bo, bool detect) {
                            std::vector<int> head(m, -1);
                            for (int i = 0; i < m; ++i) {
                                int b = bo[i];
                                if (head[b] < 0) {
                                    head[b] = i;
                                    continue;
                                }
                                int ra = find(head[b]), rb = find(i);
                                if (ra == rb) {
                                    if (detect) return false;
                                    continue;
                                }
                                uf[rb] = ra;
                            }
                            return true;
                        };
                        glue(s1.block_of, false);
                        if (!glue(s2.block_of, true)) continue;

                        SpEntry merged;
                        auto& ms = merged.state;
                        ms.present = s1.present;
                        ms.block_of.resize(m);
                        std::map<int, int> label;
                        for (int i = 0; i < m; ++i) {
                            int r = find(i);
                            auto it = label.find(r);
                            if (it == label.end()) {
                                it = label.emplace(r, ms.blocks()).first;
                                ms.school_count.emplace_back();
                            }
                            ms.block_of[i] = it->second;
                        }
                        // merge the per-side tallies; bag terminals were
                        // counted by both sides, take one copy back out
                        auto pour = [&](const SpState& s) {
                            std::vector<char> seen(s.blocks(), 0);
                            for (int i = 0; i < m; ++i) {
                                int from = s.block_of[i];
                                if (seen[from]) continue;
                                seen[from] = 1;
                                auto& into = ms.school_count[ms.block_of[i]];
                                for (auto [sc, c] : s.school_count[from]) into[sc] += c;
                            }
                        };
                        pour(s1);
                        pour(s2);
                        for (int i = 0; i < m; ++i) {
                            int scv = school_of[ms.present[i]];
                            if (scv < 0) continue;
                            auto& into = ms.school_count[ms.block_of[i]];
                            if (--into[scv] == 0) into.erase(scv);
                        }
                        ms.canonicalize();
                        merged.value = e1.value + e2.value;
                        merged.edges = e1.edges;
                        for (Edge e : e2.edges) detail::sp_add_edge(merged.edges, e);
                        detail::sp_offer(out, std::move(merged));
                    }
                }
                break;
            }
        }
        if (node.child >= 0) tables[node.child].clear();
        if (node.child2 >= 0) tables[node.child2].clear();
    }

    const SpTable& rt = tables[dec->root_index];
    const detail::SpEntry* best = nullptr;
    for (const auto& [k, en] : rt)
        if (!best || en.value < best->value ||
            (en.value == best->value && en.edges < best->edges))
            best = &en;
    if (!best) throw InfeasibleError("some demand pair cannot be connected");
    return SteinerForest{best->edges};
}

}  // namespace steiner
