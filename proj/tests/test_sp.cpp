#include <catch2/catch_amalgamated.hpp>

#include "steiner/oracle.hpp"
#include "steiner/sp_solver.hpp"
#include "support/brute.hpp"
#include "support/gen.hpp"
#include "support/td_check.hpp"

using namespace steiner;

TEST_CASE("width-2 recognition matches brute-force treewidth") {
    std::mt19937 rng(5101);
    for (int it = 0; it < 120; ++it) {
        Graph g = gen::random_graph(rng, gen::pick(rng, 0, 8), 0.4);
        REQUIRE(treewidth_at_most_2(g) == (brute::treewidth(g) <= 2));
    }
}

TEST_CASE("known members and non-members of the class") {
    REQUIRE(treewidth_at_most_2(Graph(0, {})));
    REQUIRE(treewidth_at_most_2(Graph(5, {})));
    REQUIRE(treewidth_at_most_2(gen::cycle(7)));
    // K4
    REQUIRE(!treewidth_at_most_2(Graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}})));
    REQUIRE(!treewidth_at_most_2(gen::petersen()));
    std::mt19937 rng(5102);
    for (int it = 0; it < 40; ++it)
        REQUIRE(treewidth_at_most_2(gen::random_tw2_graph(rng, gen::pick(rng, 1, 24))));
}

TEST_CASE("decompositions audit clean") {
    std::mt19937 rng(5103);
    for (int it = 0; it < 60; ++it) {
        Graph g = gen::random_tw2_graph(rng, gen::pick(rng, 1, 20), 0.7);
        auto dec = recognize_tw2(g);
        REQUIRE(dec);
        REQUIRE(tdcheck::audit(g, *dec) == "");
    }
    // disconnected: two triangles and an isolated vertex
    Graph g(7, {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}});
    auto dec = recognize_tw2(g);
    REQUIRE(dec);
    REQUIRE(tdcheck::audit(g, *dec) == "");
}

TEST_CASE("small series-parallel instances solved to the oracle optimum") {
    std::mt19937 rng(5104);
    for (int it = 0; it < 150; ++it) {
        Graph g = gen::random_tw2_graph(rng, gen::pick(rng, 2, 11), 0.75);
        auto t = gen::random_terminals(rng, g, gen::pick(rng, 1, 3));
        if (t.empty()) continue;
        auto got = solve_tw2(g, t);
        CAPTURE(g.edges(), t.pairs());
        REQUIRE(is_valid_forest(g, t, got.edges));
        REQUIRE(got.size() == solve_exact(g, t).size());
    }
}

TEST_CASE("solver is deterministic") {
    std::mt19937 rng(5105);
    for (int it = 0; it < 30; ++it) {
        Graph g = gen::random_tw2_graph(rng, gen::pick(rng, 3, 14), 0.7);
        auto t = gen::random_terminals(rng, g, 3);
        if (t.empty()) continue;
        REQUIRE(solve_tw2(g, t).edges == solve_tw2(g, t).edges);
    }
}

TEST_CASE("failure modes") {
    Graph k4(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    REQUIRE_THROWS_AS(solve_tw2(k4, TerminalSet({{0, 1}})), NotTw2Error);
    Graph split(4, {{0, 1}, {2, 3}});
    REQUIRE_THROWS_AS(solve_tw2(split, TerminalSet({{0, 2}})), InfeasibleError);
    REQUIRE_THROWS_AS(solve_tw2(Graph(2, {{0, 1}}), TerminalSet({{0, 5}})),
                      std::invalid_argument);
    REQUIRE(solve_tw2(k4.without_edge(0, 1), TerminalSet()).edges.empty());
}

TEST_CASE("two schools can share one tree") {
    // C6 with pairs (0,3) and (1,4): the single path 0-1-2-3-4 serves both
    // with 4 edges, beating any pair of disjoint paths
    Graph g = gen::cycle(6);
    auto f = solve_tw2(g, TerminalSet({{0, 3}, {1, 4}}));
    REQUIRE(f.size() == 4);
    REQUIRE(is_valid_forest(g, TerminalSet({{0, 3}, {1, 4}}), f.edges));
}

TEST_CASE("larger instance runs and stays a forest") {
    std::mt19937 rng(5106);
    Graph g = gen::random_tw2_graph(rng, 60, 0.8);
    auto t = gen::random_terminals(rng, g, 6);
    auto f = solve_tw2(g, t);
    REQUIRE(is_valid_forest(g, t, f.edges));
    // pruning sanity: dropping any single edge breaks some demand
    for (Edge e : f.edges) {
        auto fewer = f.edges;
        fewer.erase(std::find(fewer.begin(), fewer.end(), e));
        REQUIRE(!is_valid_forest(g, t, fewer));
    }
}
