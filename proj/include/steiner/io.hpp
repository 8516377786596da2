#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "terminals.hpp"

namespace steiner {

// Graph text format: first data line "n m", then m lines "u v". Lines whose
// first non-blank character is '#' are comments; some comments carry
// machine-readable annotations ("# role <v> <label>", "# budget <k>") used by
// the hardness pipeline.
struct GraphFile {
    Graph graph;
    std::map<int, std::string> roles;  // vertex -> role label, optional
    int budget = -1;                   // -1 when absent
};

namespace detail {

inline bool blank_or_comment(const std::string& line) {
    for (char c : line) {
        if (c == '#') return true;
        if (!isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

inline void scan_annotation(const std::string& line, GraphFile& out) {
    std::istringstream in(line);
    std::string hash, kind;
    in >> hash >> kind;
    if (hash != "#") return;
    if (kind == "role") {
        int v;
        std::string label;
        if (in >> v >> label) out.roles[v] = label;
    } else if (kind == "budget") {
        int k;
        if (in >> k) out.budget = k;
    }
}

}  // namespace detail

inline GraphFile read_graph_stream(std::istream& in) {
    GraphFile out;
    std::string line;
    int n = -1, m = -1;
    std::vector<Edge> edges;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::blank_or_comment(line)) {
            detail::scan_annotation(line, out);
            continue;
        }
        std::istringstream fields(line);
        if (n < 0) {
            if (!(fields >> n >> m) || n < 0 || m < 0)
                throw ParseError("line " + std::to_string(line_no) + ": expected 'n m'");
            continue;
        }
        int u, v;
        if (!(fields >> u >> v))
            throw ParseError("line " + std::to_string(line_no) + ": expected 'u v'");
        edges.emplace_back(u, v);
    }
    if (n < 0) throw ParseError("missing 'n m' header");
    if (static_cast<int>(edges.size()) != m)
        throw ParseError("expected " + std::to_string(m) + " edges, found " +
                         std::to_string(edges.size()));
    try {
        out.graph = Graph(n, std::move(edges));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return out;
}

inline GraphFile read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_graph_stream(in);
}

// Terminal file: first data line "p", then p lines "s t".
inline TerminalSet read_terminals_stream(std::istream& in) {
    std::string line;
    int p = -1;
    std::vector<Edge> pairs;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::blank_or_comment(line)) continue;
        std::istringstream fields(line);
        if (p < 0) {
            if (!(fields >> p) || p < 0)
                throw ParseError("line " + std::to_string(line_no) + ": expected pair count");
            continue;
        }
        int s, t;
        if (!(fields >> s >> t))
            throw ParseError("line " + std::to_string(line_no) + ": expected 's t'");
        pairs.emplace_back(s, t);
    }
    if (p < 0) throw ParseError("missing pair count");
    if (static_cast<int>(pairs.size()) != p)
        throw ParseError("expected " + std::to_string(p) + " pairs, found " +
                         std::to_string(pairs.size()));
    try {
        return TerminalSet(std::move(pairs));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

inline TerminalSet read_terminals_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_terminals_stream(in);
}

inline void write_graph_stream(std::ostream& out, const Graph& g,
                               const std::map<int, std::string>& roles = {}, int budget = -1) {
    if (budget >= 0) out << "# budget " << budget << "\n";
    for (const auto& [v, label] : roles) out << "# role " << v << " " << label << "\n";
    out << g.vertex_count() << " " << g.edge_count() << "\n";
    for (const auto& [u, v] : g.edges()) out << u << " " << v << "\n";
}

inline void write_terminals_stream(std::ostream& out, const TerminalSet& t) {
    out << t.size() << "\n";
    for (const auto& [s, u] : t.pairs()) out << s << " " << u << "\n";
}

inline void write_graph_file(const std::string& path, const Graph& g,
                             const std::map<int, std::string>& roles = {}, int budget = -1) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    write_graph_stream(out, g, roles, budget);
}

inline void write_terminals_file(const std::string& path, const TerminalSet& t) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    write_terminals_stream(out, t);
}

}  // namespace steiner
