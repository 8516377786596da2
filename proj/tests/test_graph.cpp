#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "steiner/graph.hpp"
#include "steiner/hspec.hpp"
#include "steiner/io.hpp"
#include "steiner/paths.hpp"
#include "steiner/pattern.hpp"
#include "steiner/terminals.hpp"
#include "support/brute.hpp"
#include "support/gen.hpp"

using namespace steiner;

namespace {

Graph petersen() {
    std::vector<Edge> es;
    for (int i = 0; i < 5; ++i) {
        es.push_back(make_edge(i, (i + 1) % 5));      // outer cycle
        es.push_back(make_edge(5 + i, 5 + (i + 2) % 5));  // inner pentagram
        es.push_back(make_edge(i, 5 + i));            // spokes
    }
    return Graph(10, es);
}

Graph cycle(int n) {
    std::vector<Edge> es;
    for (int i = 0; i < n; ++i) es.push_back(make_edge(i, (i + 1) % n));
    return Graph(n, es);
}

}  // namespace

TEST_CASE("graph basics and normalization") {
    Graph g(4, {{3, 1}, {0, 1}, {1, 3}});
    REQUIRE(g.edge_count() == 2);
    REQUIRE(g.has_edge(1, 3));
    REQUIRE(g.has_edge(3, 1));
    REQUIRE_FALSE(g.has_edge(0, 2));
    REQUIRE(g.neighbors(1) == std::vector<int>{0, 3});
    REQUIRE_THROWS_AS(Graph(2, {{0, 0}}), std::invalid_argument);
    REQUIRE_THROWS_AS(Graph(2, {{0, 5}}), std::invalid_argument);
}

TEST_CASE("connected components") {
    Graph g(6, {{0, 1}, {1, 2}, {4, 5}});
    auto comps = connected_components(g);
    REQUIRE(comps.size() == 3);
    REQUIRE(comps[0] == std::vector<int>{0, 1, 2});
    REQUIRE(comps[1] == std::vector<int>{3});
    REQUIRE(comps[2] == std::vector<int>{4, 5});
    REQUIRE_FALSE(is_connected(g));
    REQUIRE(is_connected(cycle(5)));
}

TEST_CASE("blocks of a bowtie") {
    // Two triangles sharing vertex 2.
    Graph g(5, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {2, 4}, {3, 4}});
    auto blocks = biconnected_components(g);
    REQUIRE(blocks.block_vertices.size() == 2);
    REQUIRE(blocks.block_vertices[0] == std::vector<int>{0, 1, 2});
    REQUIRE(blocks.block_vertices[1] == std::vector<int>{2, 3, 4});
    REQUIRE(blocks.cut_vertices == std::vector<int>{2});
}

TEST_CASE("blocks separate bridges") {
    // Path 0-1-2 plus triangle 2-3-4.
    Graph g(5, {{0, 1}, {1, 2}, {2, 3}, {2, 4}, {3, 4}});
    auto blocks = biconnected_components(g);
    REQUIRE(blocks.block_vertices.size() == 3);
    REQUIRE(blocks.block_vertices[0] == std::vector<int>{0, 1});
    REQUIRE(blocks.block_vertices[1] == std::vector<int>{1, 2});
    REQUIRE(blocks.block_vertices[2] == std::vector<int>{2, 3, 4});
    REQUIRE(blocks.cut_vertices == std::vector<int>{1, 2});
    REQUIRE(blocks.block_edges[0].size() == 1);  // bridge
    REQUIRE(blocks.block_edges[2].size() == 3);
}

TEST_CASE("blocks of random graphs cover all edges") {
    std::mt19937 rng(1234);
    for (int it = 0; it < 50; ++it) {
        Graph g = gen::random_graph(rng, gen::pick(rng, 1, 9), 0.3);
        auto blocks = biconnected_components(g);
        size_t total = 0;
        for (const auto& be : blocks.block_edges) total += be.size();
        REQUIRE(total == static_cast<size_t>(g.edge_count()));
        // Each edge appears in exactly one block.
        std::vector<Edge> all;
        for (const auto& be : blocks.block_edges) all.insert(all.end(), be.begin(), be.end());
        std::sort(all.begin(), all.end());
        REQUIRE(std::adjacent_find(all.begin(), all.end()) == all.end());
    }
}

TEST_CASE("identify a vertex set") {
    Graph c4 = cycle(4);
    auto id = identify_set(c4, {0, 2});
    REQUIRE(id.graph.vertex_count() == 3);
    REQUIRE(id.merged == 0);
    REQUIRE(id.vertex_map == std::vector<int>{0, 1, 0, 2});
    REQUIRE(id.graph.edges() == std::vector<Edge>{{0, 1}, {0, 2}});
    // Parallel edges collapse to the lexicographically smallest origin.
    REQUIRE(id.lift(Edge{0, 1}) == Edge{0, 1});
    REQUIRE(id.lift(Edge{0, 2}) == Edge{0, 3});
}

TEST_CASE("identification drops internal edges") {
    Graph g(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {0, 2}});
    auto id = identify_set(g, {0, 2});
    REQUIRE(id.graph.vertex_count() == 3);
    REQUIRE(id.graph.edges() == std::vector<Edge>{{0, 1}, {0, 2}});
}

TEST_CASE("longest path and cycle on the Petersen graph") {
    Graph g = petersen();
    auto path = longest_path(g);
    REQUIRE(path.length() == 10);
    for (size_t i = 0; i + 1 < path.vertices.size(); ++i)
        REQUIRE(g.has_edge(path.vertices[i], path.vertices[i + 1]));
    auto cyc = longest_cycle(g);
    REQUIRE(cyc.has_value());
    REQUIRE(cyc->length() == 9);
    for (size_t i = 0; i < cyc->vertices.size(); ++i)
        REQUIRE(g.has_edge(cyc->vertices[i], cyc->vertices[(i + 1) % cyc->vertices.size()]));
}

TEST_CASE("path and cycle search against enumeration") {
    std::mt19937 rng(77);
    for (int it = 0; it < 40; ++it) {
        Graph g = gen::random_graph(rng, gen::pick(rng, 1, 8), 0.35);
        REQUIRE(longest_path(g).length() == brute::longest_path_vertices(g));
        auto cyc = longest_cycle(g);
        int want = brute::longest_cycle_vertices(g);
        if (want == 0) {
            REQUIRE_FALSE(cyc.has_value());
        } else {
            REQUIRE(cyc.has_value());
            REQUIRE(cyc->length() == want);
        }
    }
}

TEST_CASE("longest path tie-break is lexicographic") {
    // Two maximum paths exist in a star with two long arms; the smaller
    // sequence must win.
    Graph g(5, {{0, 1}, {1, 2}, {2, 3}, {2, 4}});
    auto path = longest_path(g);
    REQUIRE(path.vertices == std::vector<int>{0, 1, 2, 3});
    auto cyc = longest_cycle(cycle(4));
    REQUIRE(cyc->vertices == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("pattern search finds subdivided claws") {
    Graph g = petersen();
    REQUIRE(contains_pattern(g, parse_hspec("S2,2,2")));
    REQUIRE(contains_pattern(g, parse_hspec("P10")));
    REQUIRE_FALSE(contains_pattern(g, parse_hspec("P11")));
    // S3,3,4 hosts P8 but not P9.
    Graph host = spec_to_graph(parse_hspec("S3,3,4"));
    REQUIRE(contains_pattern(host, parse_hspec("P8")));
    REQUIRE_FALSE(contains_pattern(host, parse_hspec("P9")));
}

TEST_CASE("pattern search agrees with raw embedding search") {
    std::mt19937 rng(4242);
    std::vector<HSpec> needles = {
        parse_hspec("P3"),        parse_hspec("P5"),       parse_hspec("S1,1,1"),
        parse_hspec("S1,2,2"),    parse_hspec("P3+P3"),    parse_hspec("S1,1,1+P2"),
        parse_hspec("P2+P2+P2"),
    };
    for (int it = 0; it < 30; ++it) {
        Graph g = gen::random_graph(rng, gen::pick(rng, 3, 9), 0.35);
        for (const auto& needle : needles) {
            bool got = contains_pattern(g, needle);
            bool want = brute::embeds(spec_to_graph(needle), g);
            INFO("needle " << format_hspec(needle));
            REQUIRE(got == want);
        }
    }
}

TEST_CASE("pattern embeddings are vertex-disjoint and edge-faithful") {
    std::mt19937 rng(99);
    for (int it = 0; it < 20; ++it) {
        Graph g = gen::random_connected_graph(rng, 9, 0.3);
        auto emb = find_pattern(g, parse_hspec("S1,1,2+P2"));
        if (!emb) continue;
        auto vs = emb->vertices();
        REQUIRE(std::adjacent_find(vs.begin(), vs.end()) == vs.end());
        for (const auto& c : emb->components) {
            if (std::holds_alternative<PathEmbedding>(c)) {
                const auto& p = std::get<PathEmbedding>(c);
                for (size_t i = 0; i + 1 < p.vertices.size(); ++i)
                    REQUIRE(g.has_edge(p.vertices[i], p.vertices[i + 1]));
            } else {
                const auto& cl = std::get<ClawEmbedding>(c);
                for (const auto& leg : cl.legs) {
                    int prev = cl.centre;
                    for (int v : leg) {
                        REQUIRE(g.has_edge(prev, v));
                        prev = v;
                    }
                }
            }
        }
    }
}

TEST_CASE("hspec parse and format round trip") {
    REQUIRE(format_hspec(parse_hspec("P11")) == "P11");
    REQUIRE(format_hspec(parse_hspec("S2,3,5")) == "S2,3,5");
    REQUIRE(format_hspec(parse_hspec("S1,1,1+P4")) == "S1,1,1+P4");
    REQUIRE(format_hspec(parse_hspec("S5,3,2")) == "S2,3,5");  // legs sort
    REQUIRE_THROWS_AS(parse_hspec("Q4"), ParseError);
    REQUIRE_THROWS_AS(parse_hspec("S1,1"), ParseError);
    REQUIRE_THROWS_AS(parse_hspec(""), ParseError);
    REQUIRE_THROWS_AS(parse_hspec("P4+"), ParseError);
}

TEST_CASE("hspec recognition") {
    REQUIRE(recognize_hspec(spec_to_graph(parse_hspec("P7"))) == parse_hspec("P7"));
    REQUIRE(recognize_hspec(spec_to_graph(parse_hspec("S2,3,5"))) == parse_hspec("S2,3,5"));
    REQUIRE(recognize_hspec(spec_to_graph(parse_hspec("S1,1,1+P4+P2"))) ==
            parse_hspec("S1,1,1+P4+P2"));
    REQUIRE_FALSE(recognize_hspec(cycle(4)).has_value());
    // Double star (two degree-3 vertices) is not a subdivided claw.
    Graph spider(8, {{0, 1}, {0, 2}, {0, 3}, {3, 4}, {4, 5}, {4, 6}, {6, 7}});
    REQUIRE_FALSE(recognize_hspec(spider).has_value());
}

TEST_CASE("containment rules between single components") {
    auto P = [](int r) { return ComponentSpec{PathSpec{r}}; };
    auto S = [](int a, int b, int c) { return ComponentSpec{make_claw(a, b, c)}; };
    REQUIRE(component_contains(P(11), P(11)));
    REQUIRE(component_contains(P(11), P(1)));
    REQUIRE_FALSE(component_contains(P(10), P(11)));
    REQUIRE(component_contains(S(3, 3, 4), P(8)));
    REQUIRE_FALSE(component_contains(S(3, 3, 4), P(9)));
    REQUIRE(component_contains(S(2, 3, 5), S(1, 3, 5)));
    REQUIRE_FALSE(component_contains(S(2, 3, 5), S(3, 3, 3)));
    REQUIRE_FALSE(component_contains(P(11), S(1, 1, 1)));
}

TEST_CASE("containment rules match embedding on concrete graphs") {
    std::vector<ComponentSpec> specs = {
        ComponentSpec{PathSpec{4}}, ComponentSpec{PathSpec{7}}, ComponentSpec{make_claw(1, 1, 1)},
        ComponentSpec{make_claw(1, 2, 3)}, ComponentSpec{make_claw(2, 2, 2)},
    };
    for (const auto& big : specs)
        for (const auto& small : specs) {
            Graph host = spec_to_graph(HSpec{{big}});
            Graph needle = spec_to_graph(HSpec{{small}});
            REQUIRE(component_contains(big, small) == brute::embeds(needle, host));
        }
}

TEST_CASE("graph file round trip") {
    Graph g(4, {{0, 1}, {1, 2}, {2, 3}});
    std::ostringstream out;
    write_graph_stream(out, g, {{0, "d0"}}, 7);
    std::istringstream in(out.str());
    auto file = read_graph_stream(in);
    REQUIRE(file.graph.edges() == g.edges());
    REQUIRE(file.budget == 7);
    REQUIRE(file.roles.at(0) == "d0");

    std::istringstream bad("3 2\n0 1\n");
    REQUIRE_THROWS_AS(read_graph_stream(bad), ParseError);
    std::istringstream junk("x y\n");
    REQUIRE_THROWS_AS(read_graph_stream(junk), ParseError);
}

TEST_CASE("terminal file round trip") {
    TerminalSet t({{0, 3}, {1, 2}});
    std::ostringstream out;
    write_terminals_stream(out, t);
    std::istringstream in(out.str());
    REQUIRE(read_terminals_stream(in) == t);
}

TEST_CASE("schools partition terminal vertices") {
    TerminalSet t({{0, 1}, {1, 2}, {4, 5}});
    auto sch = schools(t, 6);
    REQUIRE(sch.count() == 2);
    REQUIRE(sch.parts[0] == std::vector<int>{0, 1, 2});
    REQUIRE(sch.parts[1] == std::vector<int>{4, 5});
    REQUIRE(sch.school_of[1] == 0);
    REQUIRE(sch.school_of[3] == -1);
    REQUIRE(sch.school_of[5] == 1);
}

TEST_CASE("forest validity checks") {
    Graph g = cycle(4);
    TerminalSet t({{0, 2}});
    REQUIRE(is_valid_forest(g, t, {{0, 1}, {1, 2}}));
    REQUIRE_FALSE(is_valid_forest(g, t, {{0, 1}}));
    REQUIRE_FALSE(is_valid_forest(g, t, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}));  // cycle
    REQUIRE_FALSE(is_valid_forest(g, t, {{0, 2}}));  // not an edge of g
}
