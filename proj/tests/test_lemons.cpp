#include <catch2/catch_amalgamated.hpp>
#include <functional>
#include <numeric>
#include <set>

#include "steiner/lemon_solvers.hpp"
#include "support/gen.hpp"

using namespace steiner;

namespace {

// Reference optima for the three modes, straight from the exact solver:
// intertwined adds the end pair as a demand, identified merges the ends
// first and compares by size only.
int free_brute(const Graph& g, const TerminalSet& t) { return solve_exact(g, t).size(); }

int intertwined_brute(const Graph& g, const Citrus& c, const TerminalSet& t) {
    TerminalSet txy = t.merged_with(TerminalSet{{make_edge(c.x, c.y)}});
    return solve_exact(g, txy).size();
}

int identified_brute(const Graph& g, const Citrus& c, const TerminalSet& t) {
    Identification id = identify_set(g, {c.x, c.y});
    return solve_exact(id.graph, t.relabel(id.vertex_map)).size();
}

bool connects(const Graph& g, const std::vector<Edge>& es, int a, int b) {
    std::vector<int> par(g.vertex_count());
    std::iota(par.begin(), par.end(), 0);
    std::function<int(int)> find = [&](int v) {
        while (par[v] != v) v = par[v] = par[par[v]];
        return v;
    };
    for (auto [u, v] : es) par[find(u)] = find(v);
    return find(a) == find(b);
}

// Bush decomposition for a generated bush: one citrus per consecutive stem
// pair. make_citrus over the whole graph also reports the far remainder of a
// ring (its neighbourhood is the same stem pair), so wedges that contain a
// stem are discarded.
BushDecomposition built_bush_decomposition(const gen::BuiltBush& b, bool cyclic) {
    BushDecomposition bd;
    bd.stems = b.stems;
    int m = static_cast<int>(b.stems.size());
    std::set<int> stem_set(b.stems.begin(), b.stems.end());
    int pairs = cyclic ? m : m - 1;
    for (int p = 0; p < pairs; ++p) {
        Edge e = make_edge(b.stems[p], b.stems[(p + 1) % m]);
        Citrus whole = make_citrus(b.graph, e.first, e.second);
        Citrus local;
        local.x = whole.x;
        local.y = whole.y;
        local.direct_edge = whole.direct_edge;
        for (auto& w : whole.wedges) {
            bool has_stem = false;
            for (int v : w.interior) has_stem |= stem_set.count(v) > 0;
            if (!has_stem) local.wedges.push_back(w);
        }
        bd.flower_edges.push_back(e);
        bd.citrus[e] = std::move(local);
    }
    return bd;
}

BushDecomposition ring_of_direct_edges(int m) {
    BushDecomposition b;
    for (int p = 0; p < m; ++p) b.stems.push_back(p);
    for (int p = 0; p < m; ++p) {
        Edge e = make_edge(p, (p + 1) % m);
        b.flower_edges.push_back(e);
        Citrus c;
        c.x = e.first;
        c.y = e.second;
        c.direct_edge = true;
        b.citrus[e] = c;
    }
    return b;
}

Graph cycle_graph(int m) {
    std::vector<Edge> es;
    for (int p = 0; p < m; ++p) es.push_back(make_edge(p, (p + 1) % m));
    return Graph(m, std::move(es));
}

}  // namespace

TEST_CASE("single-edge citrus in each mode") {
    Graph g(2, {make_edge(0, 1)});
    Citrus c;
    c.x = 0;
    c.y = 1;
    c.direct_edge = true;

    CHECK(solve_citrus(g, c, TerminalSet{}, CitrusSolveMode::Free, 5).edges.empty());
    CHECK(solve_citrus(g, c, TerminalSet{}, CitrusSolveMode::Identified, 5)
              .edges.empty());
    CHECK(solve_citrus(g, c, TerminalSet{}, CitrusSolveMode::Intertwined, 5).edges ==
          std::vector<Edge>{make_edge(0, 1)});
}

TEST_CASE("two lone-vertex wedges form a four-cycle") {
    Graph g(4, {make_edge(0, 2), make_edge(1, 2), make_edge(0, 3), make_edge(1, 3)});
    Citrus c = make_citrus(g, 0, 1);
    REQUIRE(c.wedges.size() == 2);
    TerminalSet t{{make_edge(2, 3)}};

    SteinerForest f = solve_citrus(g, c, t, CitrusSolveMode::Free, 5);
    // A two-edge path through either end links the wedge interiors.
    CHECK(f.size() == 2);
    CHECK(f.size() == free_brute(g, t));
    // Forcing the ends together costs one more edge.
    CHECK(solve_citrus(g, c, t, CitrusSolveMode::Intertwined, 5).size() == 3);
    CHECK(solve_citrus(g, c, t, CitrusSolveMode::Identified, 5).size() == 2);
}

TEST_CASE("citrus solver rejects oversized wedges and partial vesicles") {
    // A six-vertex wedge blows the size budget at ell = 5.
    std::vector<Edge> es;
    int n = 2;
    gen::add_pulped6_wedge(es, n, 0, 1);
    Graph g(n, es);
    Citrus c = make_citrus(g, 0, 1);
    REQUIRE(c.pulped_count() == 1);
    CHECK_THROWS_AS(solve_citrus(g, c, TerminalSet{}, CitrusSolveMode::Free, 5),
                    NotALemonError);
    // Same citrus is fine at ell = 6.
    CHECK_NOTHROW(solve_citrus(g, c, TerminalSet{}, CitrusSolveMode::Free, 6));

    // The vesicle must cover the graph exactly.
    Graph g2(n + 1, es);
    CHECK_THROWS_AS(solve_citrus(g2, c, TerminalSet{}, CitrusSolveMode::Free, 6),
                    std::invalid_argument);
}

TEST_CASE("intertwined without any route is infeasible") {
    Graph g(2, {});
    Citrus c;
    c.x = 0;
    c.y = 1;
    CHECK_THROWS_AS(solve_citrus(g, c, TerminalSet{}, CitrusSolveMode::Intertwined, 5),
                    InfeasibleError);
}

TEST_CASE("random lemons match the mode-constrained optima") {
    std::mt19937 rng(61001);
    int done = 0;
    while (done < 60) {
        std::vector<Edge> es;
        int n = 2;
        gen::add_citrus(rng, es, n, 0, 1, gen::random_citrus_plan(rng, true));
        if (n > 14) continue;
        Graph g(n, es);
        Citrus c = make_citrus(g, 0, 1);
        TerminalSet t = gen::random_terminals(rng, g, gen::pick(rng, 0, 3));
        CAPTURE(n, g.edge_count(), t.size(), done);

        SteinerForest fr = solve_citrus(g, c, t, CitrusSolveMode::Free, 5);
        REQUIRE(is_valid_forest(g, t, fr.edges));
        REQUIRE(fr.size() == free_brute(g, t));

        SteinerForest fi = solve_citrus(g, c, t, CitrusSolveMode::Intertwined, 5);
        TerminalSet txy = t.merged_with(TerminalSet{{make_edge(0, 1)}});
        REQUIRE(is_valid_forest(g, txy, fi.edges));
        REQUIRE(connects(g, fi.edges, c.x, c.y));
        REQUIRE(fi.size() == intertwined_brute(g, c, t));

        SteinerForest fd = solve_citrus(g, c, t, CitrusSolveMode::Identified, 5);
        REQUIRE(is_valid_forest(g, TerminalSet{}, fd.edges));
        REQUIRE(!connects(g, fd.edges, c.x, c.y));
        REQUIRE(fd.size() == identified_brute(g, c, t));

        ++done;
    }
}

TEST_CASE("bush tw2 solver handles a plain cycle") {
    Graph g = cycle_graph(6);
    SteinerForest f = solve_bush_tw2(g, BushDecomposition{}, TerminalSet{{make_edge(0, 3)}});
    CHECK(f.size() == 3);
}

TEST_CASE("bush tw2 solver on a mixed four-citrus path") {
    // Stems 0..4. Citrus (0,1): direct edge plus wedges {5,6}, {7,8}, {9},
    // {10}; citrus (1,2): wedges {11}, {12}; citrus (2,3): direct edge only;
    // citrus (3,4): wedge {13,14,15}.
    Graph g(16, {make_edge(0, 1),
                 make_edge(0, 5), make_edge(5, 6), make_edge(6, 1),
                 make_edge(0, 7), make_edge(7, 8), make_edge(8, 1),
                 make_edge(0, 9), make_edge(9, 1),
                 make_edge(0, 10), make_edge(10, 1),
                 make_edge(1, 11), make_edge(11, 2),
                 make_edge(1, 12), make_edge(12, 2),
                 make_edge(2, 3),
                 make_edge(3, 13), make_edge(13, 14), make_edge(14, 15),
                 make_edge(15, 4)});
    TerminalSet t{{make_edge(5, 13), make_edge(9, 12)}};
    SteinerForest f = solve_bush_tw2(g, BushDecomposition{}, t);
    REQUIRE(is_valid_forest(g, t, f.edges));
    CHECK(f.size() == 7);
    CHECK(f.size() == free_brute(g, t));
}

TEST_CASE("bush tw2 solver refuses a surviving dense flower") {
    // K4 flower with one lone-vertex wedge per flower edge: every stem has
    // degree six, so no reduction fires and the K4 minor survives.
    std::vector<Edge> es;
    int n = 4;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            es.push_back(make_edge(i, j));
            int w = n++;
            es.push_back(make_edge(i, w));
            es.push_back(make_edge(j, w));
        }
    Graph g(n, es);
    REQUIRE(!treewidth_at_most_2(g));
    CHECK_THROWS_AS(
        solve_bush_tw2(g, BushDecomposition{}, TerminalSet{{make_edge(0, 3)}}),
        NotTw2AfterTransformError);
}

TEST_CASE("path bush of two direct edges") {
    Graph g(3, {make_edge(0, 1), make_edge(1, 2)});
    BushDecomposition b;
    b.stems = {0, 1, 2};
    for (int p = 0; p < 2; ++p) {
        Edge e = make_edge(p, p + 1);
        b.flower_edges.push_back(e);
        Citrus c;
        c.x = e.first;
        c.y = e.second;
        c.direct_edge = true;
        b.citrus[e] = c;
    }
    SteinerForest f = solve_path_bush(g, b, TerminalSet{{make_edge(0, 2)}}, 5);
    CHECK(f.size() == 2);
}

TEST_CASE("one-citrus path bush equals free mode") {
    std::mt19937 rng(61002);
    for (int tr = 0; tr < 20; ++tr) {
        std::vector<Edge> es;
        int n = 2;
        gen::add_citrus(rng, es, n, 0, 1, gen::random_citrus_plan(rng, true));
        Graph g(n, es);
        Citrus c = make_citrus(g, 0, 1);
        TerminalSet t = gen::random_terminals(rng, g, gen::pick(rng, 1, 3));

        BushDecomposition b;
        b.stems = {0, 1};
        b.flower_edges = {make_edge(0, 1)};
        b.citrus[make_edge(0, 1)] = c;

        CAPTURE(n, tr);
        CHECK(solve_path_bush(g, b, t, 5).size() ==
              solve_citrus(g, c, t, CitrusSolveMode::Free, 5).size());
    }
}

TEST_CASE("random path bushes match the exact solver") {
    std::mt19937 rng(61003);
    int done = 0;
    while (done < 50) {
        gen::BuiltBush b = gen::random_path_bush(rng, gen::pick(rng, 2, 4), true);
        if (b.graph.vertex_count() > 15) continue;
        TerminalSet t = gen::random_terminals(rng, b.graph, gen::pick(rng, 1, 3));
        BushDecomposition bd = built_bush_decomposition(b, false);
        CAPTURE(b.graph.vertex_count(), t.size(), done);

        SteinerForest f = solve_path_bush(b.graph, bd, t, 5);
        REQUIRE(is_valid_forest(b.graph, t, f.edges));
        REQUIRE(f.size() == free_brute(b.graph, t));
        ++done;
    }
}

TEST_CASE("cycle bush on a chordless five-cycle") {
    Graph g = cycle_graph(5);
    SteinerForest f =
        solve_cycle_bush(g, ring_of_direct_edges(5), TerminalSet{{make_edge(0, 2)}}, 5);
    CHECK(f.size() == 2);
}

TEST_CASE("cycle bush trace: identified guess wins") {
    Graph g = cycle_graph(6);
    TerminalSet t{{make_edge(0, 1), make_edge(1, 2), make_edge(2, 3), make_edge(3, 4),
                   make_edge(4, 5)}};
    CycleBushTrace trace;
    SteinerForest f = solve_cycle_bush(g, ring_of_direct_edges(6), t, 5, &trace);
    CHECK(f.size() == 5);
    CHECK(f.size() == free_brute(g, t));
    CHECK(trace.winning_case == 1);
    CHECK(trace.guess1 == make_edge(4, 5));
}

TEST_CASE("cycle bush trace: double guess wins strictly") {
    // Stems 0..3 on a square; citrus (0,1) carries the path 0-4-5-6-1 and
    // citrus (2,3) the path 2-7-8-9-3; the other two are direct edges.
    Graph g(10, {make_edge(0, 4), make_edge(4, 5), make_edge(5, 6), make_edge(6, 1),
                 make_edge(1, 2),
                 make_edge(2, 7), make_edge(7, 8), make_edge(8, 9), make_edge(9, 3),
                 make_edge(3, 0)});
    BushDecomposition b;
    b.stems = {0, 1, 2, 3};
    auto add = [&](int x, int y, std::vector<int> inter, bool direct) {
        Edge e = make_edge(x, y);
        b.flower_edges.push_back(e);
        Citrus c;
        c.x = e.first;
        c.y = e.second;
        c.direct_edge = direct;
        if (!inter.empty()) {
            Wedge w;
            w.x = c.x;
            w.y = c.y;
            w.interior = std::move(inter);
            w.cls = WedgeClass::Juicy;
            c.wedges.push_back(w);
        }
        b.citrus[e] = c;
    };
    add(0, 1, {4, 5, 6}, false);
    add(1, 2, {}, true);
    add(2, 3, {7, 8, 9}, false);
    add(3, 0, {}, true);

    TerminalSet t{{make_edge(6, 7), make_edge(4, 9)}};
    CycleBushTrace trace;
    SteinerForest f = solve_cycle_bush(g, b, t, 5, &trace);
    CHECK(f.size() == 6);
    CHECK(f.size() == free_brute(g, t));
    CHECK(trace.winning_case == 2);
    CHECK(trace.guess1 == make_edge(0, 1));
    CHECK(trace.guess2 == make_edge(2, 3));
}

TEST_CASE("cycle bush trace: single glued guess wins") {
    Graph g = cycle_graph(6);
    TerminalSet t{{make_edge(0, 3)}};
    CycleBushTrace trace;
    SteinerForest f = solve_cycle_bush(g, ring_of_direct_edges(6), t, 5, &trace);
    CHECK(f.size() == 3);
    CHECK(trace.winning_case == 3);
}

TEST_CASE("random cycle bushes match the exact solver") {
    std::mt19937 rng(61004);
    int done = 0;
    while (done < 50) {
        gen::BuiltBush b = gen::random_cycle_bush(rng, gen::pick(rng, 3, 5), true);
        if (b.graph.vertex_count() > 15) continue;
        TerminalSet t = gen::random_terminals(rng, b.graph, gen::pick(rng, 1, 3));
        BushDecomposition bd = built_bush_decomposition(b, true);
        CAPTURE(b.graph.vertex_count(), t.size(), done);

        CycleBushTrace trace;
        SteinerForest f = solve_cycle_bush(b.graph, bd, t, 5, &trace);
        REQUIRE(is_valid_forest(b.graph, t, f.edges));
        REQUIRE(f.size() == free_brute(b.graph, t));
        REQUIRE(trace.winning_case >= 1);
        REQUIRE(trace.winning_case <= 3);

        // The solution can never keep the whole ring: some consecutive stem
        // pair must end up unlinked or linked only through the far side.
        int m = static_cast<int>(bd.stems.size());
        bool full_ring = true;
        for (int p = 0; p < m && full_ring; ++p) {
            std::vector<int> ves =
                bd.citrus.at(make_edge(bd.stems[p], bd.stems[(p + 1) % m])).vesicle();
            std::set<int> inside(ves.begin(), ves.end());
            std::vector<Edge> local;
            for (auto e : f.edges)
                if (inside.count(e.first) && inside.count(e.second)) local.push_back(e);
            full_ring = connects(b.graph, local, bd.stems[p], bd.stems[(p + 1) % m]);
        }
        REQUIRE(!full_ring);
        ++done;
    }
}

TEST_CASE("cycle bush with empty demand set is empty") {
    Graph g = cycle_graph(4);
    CycleBushTrace trace;
    SteinerForest f = solve_cycle_bush(g, ring_of_direct_edges(4), TerminalSet{}, 5, &trace);
    CHECK(f.edges.empty());
    CHECK(trace.winning_case == 0);
}
