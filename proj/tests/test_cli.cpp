// Round trips through the installed command-line tool: every subcommand, both
// output modes, and the documented exit codes. Runs the real binary (path
// injected at configure time) against files in a scratch directory.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "steiner/graph.hpp"
#include "steiner/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& scratch() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "sforest-cli-test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

void put(const fs::path& p, const std::string& content) {
    std::ofstream o(p);
    o << content;
}

// Runs `sforest <args>`, captures stdout+stderr, returns the exit code.
int run(const std::string& args, std::string* out = nullptr) {
    fs::path of = scratch() / "out.txt";
    std::string cmd =
        std::string(SFOREST_BIN) + " " + args + " > " + of.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    if (out) {
        std::ifstream in(of);
        std::stringstream ss;
        ss << in.rdbuf();
        *out = ss.str();
    }
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

bool has_line(const std::string& s, const std::string& want) {
    for (const auto& l : lines_of(s))
        if (l == want) return true;
    return false;
}

std::string line_with_prefix(const std::string& s, const std::string& prefix) {
    for (const auto& l : lines_of(s))
        if (l.rfind(prefix, 0) == 0) return l;
    return {};
}

fs::path c6_graph() {
    fs::path p = scratch() / "c6.graph";
    put(p, "6 6\n0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n");
    return p;
}

fs::path c6_terms() {
    fs::path p = scratch() / "c6.terms";
    put(p, "1\n0 3\n");
    return p;
}

}  // namespace

TEST_CASE("solve: six-cycle, text and json") {
    std::string g = c6_graph().string(), t = c6_terms().string();
    std::string out;
    REQUIRE(run("solve " + g + " " + t, &out) == 0);
    CHECK(has_line(out, "size\t3"));
    CHECK(line_with_prefix(out, "trace\tschools\tq=1") != "");
    std::string tw2 = line_with_prefix(out, "trace\ttw2\t");
    REQUIRE(tw2 != "");
    CHECK(tw2.substr(tw2.size() - 2) == "\t3");
    CHECK(line_with_prefix(out, "time-ms\t") != "");
    int edges = 0;
    for (const auto& l : lines_of(out)) edges += l.rfind("edge\t", 0) == 0;
    CHECK(edges == 3);

    REQUIRE(run("solve --json " + g + " " + t, &out) == 0);
    json j = json::parse(out);
    CHECK(j["size"] == 3);
    CHECK(j["edges"].size() == 3);
    REQUIRE(j["trace"].is_array());
    CHECK(j["trace"][0]["step"] == "schools");
    bool saw_tw2 = false;
    for (const auto& e : j["trace"])
        if (e["step"] == "tw2" && e["size"] == 3) saw_tw2 = true;
    CHECK(saw_tw2);
    CHECK(j["time_ms"].get<double>() >= 0.0);
}

TEST_CASE("solve: method and order flags") {
    std::string g = c6_graph().string(), t = c6_terms().string();
    std::string out;
    REQUIRE(run("solve --method exact " + g + " " + t, &out) == 0);
    CHECK(has_line(out, "size\t3"));
    CHECK(line_with_prefix(out, "trace\texact\t") != "");
    REQUIRE(run("solve --order d " + g + " " + t, &out) == 0);
    CHECK(line_with_prefix(out, "trace\tpath-bush\t") != "");

    CHECK(run("solve --method bogus " + g + " " + t) == 3);
    CHECK(run("solve --order abx " + g + " " + t) == 3);
}

TEST_CASE("detect: six-cycle") {
    std::string g = c6_graph().string();
    std::string out;
    REQUIRE(run("detect " + g, &out) == 0);
    CHECK(has_line(out, "tw2\tyes"));
    CHECK(has_line(out, "longest-path\t6"));
    CHECK(has_line(out, "tangle\tyes\tstems=6"));
    CHECK(has_line(out, "cycle-bush\tyes\tstems=6"));
    CHECK(has_line(out, "path-bush\tyes\tcitruses=1"));

    REQUIRE(run("detect --json " + g, &out) == 0);
    json j = json::parse(out);
    CHECK(j["tw2"] == true);
    CHECK(j["longest_path"] == 6);
    CHECK(j["tangle"]["stems"] == 6);
    CHECK(j["cycle_bush"]["stems"] == 6);
    CHECK(j["path_bush"]["citruses"] == 1);

    // A tight stem bound turns the tangle detector off.
    REQUIRE(run("detect --stem-bound 3 " + g, &out) == 0);
    CHECK(has_line(out, "tangle\tno"));
}

TEST_CASE("classify-h and classify-deletion") {
    std::string out;
    REQUIRE(run("classify-h P12", &out) == 0);
    CHECK(has_line(out, "NPComplete\t3P4<=H"));
    REQUIRE(run("classify-h P5", &out) == 0);
    CHECK(has_line(out, "Poly\tH<=P11"));
    REQUIRE(run("classify-h --json S2,3,5", &out) == 0);
    json j = json::parse(out);
    CHECK(j["verdict"] == "Poly");
    CHECK(j["witness"] == "H<=S2,3,5");

    // A graph file is accepted in place of a pattern spec.
    fs::path p4 = scratch() / "p4.graph";
    put(p4, "4 3\n0 1\n1 2\n2 3\n");
    REQUIRE(run("classify-h " + p4.string(), &out) == 0);
    CHECK(has_line(out, "Poly\tH<=P11"));

    CHECK(run("classify-h Q7") == 3);

    REQUIRE(run("classify-deletion 2 2", &out) == 0);
    CHECK(has_line(out, "Poly\tc=2,k<=2"));
    REQUIRE(run("classify-deletion 3 2", &out) == 0);
    CHECK(has_line(out, "NPComplete\tc>=3,k>=2"));
    CHECK(run("classify-deletion 0 0") == 3);
}

TEST_CASE("gen-hard and verify-hard round trip") {
    fs::path csp = scratch() / "fig.csp";
    put(csp, "vars 2\nneq 0 1\nneq 1 2\nimp 0 1 0\n");
    std::string prefix = (scratch() / "fig-hard").string();
    std::string out;
    REQUIRE(run("gen-hard --json --from csp " + csp.string() + " -o " + prefix +
                    " --emit-csp " + (scratch() / "fig-padded.csp").string(),
                &out) == 0);
    json j = json::parse(out);
    CHECK(j["n"] == 7);
    CHECK(j["m"] == 10);
    CHECK(j["budget"] == 4);
    REQUIRE(fs::exists(prefix + ".graph"));
    REQUIRE(fs::exists(prefix + ".terms"));
    REQUIRE(fs::exists(scratch() / "fig-padded.csp"));

    REQUIRE(run("verify-hard " + prefix + ".graph " + prefix + ".terms", &out) == 0);
    CHECK(has_line(out, "budget\t4"));
    CHECK(has_line(out, "deletion-set\tok"));
    CHECK(has_line(out, "tw3\tok"));
    CHECK(has_line(out, "optimum\t4"));
    CHECK(has_line(out, "within-budget\tyes"));
    CHECK(has_line(out, "assignment\t0 0"));

    REQUIRE(run("verify-hard --json " + prefix + ".graph " + prefix + ".terms",
                &out) == 0);
    j = json::parse(out);
    CHECK(j["ok"] == true);
    CHECK(j["optimum"] == 4);
    CHECK(j["assignment"] == json::array({0, 0}));

    SECTION("tampered instances are rejected") {
        steiner::GraphFile gf = steiner::read_graph_file(prefix + ".graph");
        int x0 = -1, x1 = -1;
        for (const auto& [v, label] : gf.roles) {
            if (label == "x0") x0 = v;
            if (label == "x1") x1 = v;
        }
        REQUIRE(x0 >= 0);
        REQUIRE(x1 >= 0);
        // An x-x edge exists in no certificate bag.
        auto es = gf.graph.edges();
        es.push_back(steiner::make_edge(x0, x1));
        fs::path bad = scratch() / "tampered.graph";
        steiner::write_graph_file(bad.string(),
                                  steiner::Graph(gf.graph.vertex_count(), es),
                                  gf.roles, gf.budget);
        REQUIRE(run("verify-hard " + bad.string() + " " + prefix + ".terms",
                    &out) == 1);
        CHECK(out.find("FAIL") != std::string::npos);

        // Without the budget annotation the file no longer describes a
        // generated instance at all.
        fs::path nb = scratch() / "nobudget.graph";
        steiner::write_graph_file(nb.string(), gf.graph, gf.roles);
        CHECK(run("verify-hard " + nb.string() + " " + prefix + ".terms") == 3);
    }
}

TEST_CASE("gen-hard from a 3-coloring instance") {
    fs::path tri = scratch() / "tri.graph";
    put(tri, "3 3\n0 1\n0 2\n1 2\n");
    std::string prefix = (scratch() / "tri-hard").string();
    std::string out;
    REQUIRE(run("gen-hard --json --from 3col " + tri.string() + " -o " + prefix,
                &out) == 0);
    json j = json::parse(out);
    CHECK(j["n"].get<int>() > 18);  // big enough that the oracle is skipped
    CHECK(j["budget"] == j["csp_vars"].get<int>() + 2 * j["csp_binary"].get<int>());

    REQUIRE(run("verify-hard " + prefix + ".graph " + prefix + ".terms", &out) == 0);
    CHECK(has_line(out, "deletion-set\tok"));
    CHECK(has_line(out, "tw3\tok"));
    CHECK(has_line(out, "optimum\tskipped"));
}

TEST_CASE("reduce round trip") {
    // N(3) = {0,1} sits strictly inside N(2) = {0,1,4}, so 3 is dominated.
    fs::path g = scratch() / "dom.graph";
    put(g, "5 5\n0 2\n1 2\n0 3\n1 3\n2 4\n");
    fs::path tf = scratch() / "dom.terms";
    put(tf, "1\n0 1\n");
    fs::path rg = scratch() / "dom-reduced.graph";
    fs::path rt = scratch() / "dom-reduced.terms";
    std::string out;
    REQUIRE(run("reduce " + g.string() + " " + tf.string() + " --out-graph " +
                    rg.string() + " --out-terms " + rt.string(),
                &out) == 0);
    CHECK(line_with_prefix(out, "removed\t") != "");
    CHECK(has_line(out, "pairs\t1"));

    // The reduced instance solves to the same optimum.
    std::string a, b;
    REQUIRE(run("solve " + g.string() + " " + tf.string(), &a) == 0);
    REQUIRE(run("solve " + rg.string() + " " + rt.string(), &b) == 0);
    CHECK(line_with_prefix(a, "size\t") == line_with_prefix(b, "size\t"));
}

TEST_CASE("exit codes") {
    fs::path dg = scratch() / "disc.graph";
    put(dg, "4 2\n0 1\n2 3\n");
    fs::path dt = scratch() / "disc.terms";
    put(dt, "1\n0 2\n");
    CHECK(run("solve " + dg.string() + " " + dt.string()) == 2);

    fs::path bad = scratch() / "bad.graph";
    put(bad, "3\n0 1\n");
    CHECK(run("solve " + bad.string() + " " + dt.string()) == 3);
    CHECK(run("solve " + (scratch() / "missing.graph").string() + " " +
              dt.string()) == 3);
    CHECK(run("") == 3);          // a subcommand is required
    CHECK(run("--help") == 0);
    CHECK(run("frobnicate") == 3);
}
