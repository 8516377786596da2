#pragma once

// Executable hardness reductions: 3-Colouring -> CSP over {0,1,2} with the
// relations (x != d) and (x=d)->(y=d), and from that CSP to Steiner Forest
// instances whose optimum is n + 2*m2 exactly when the CSP is satisfiable.
// The produced graphs are small-deletion-set, treewidth-3 witnesses; both
// certificates come with direct checkers, and a forest within budget can be
// decoded back into a satisfying assignment.

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "steiner/errors.hpp"
#include "steiner/graph.hpp"
#include "steiner/io.hpp"
#include "steiner/terminals.hpp"

namespace steiner {

// (x != forbidden).
struct UnaryConstraint {
    int var = 0;
    int forbidden = 0;
    bool operator==(const UnaryConstraint&) const = default;
};

// (var1 = value) -> (var2 = value).
struct BinaryConstraint {
    int var1 = 0;
    int var2 = 0;
    int value = 0;
    bool operator==(const BinaryConstraint&) const = default;
};

// CSP over domain {0,1,2} with the two relation families above.
struct CspInstance {
    int n = 0;  // variables are 0..n-1
    std::vector<UnaryConstraint> unary;
    std::vector<BinaryConstraint> binary;
};

inline void check_csp(const CspInstance& inst) {
    if (inst.n < 0) throw std::invalid_argument("csp: negative variable count");
    for (const auto& u : inst.unary) {
        if (u.var < 0 || u.var >= inst.n) throw std::invalid_argument("csp: unary var out of range");
        if (u.forbidden < 0 || u.forbidden > 2)
            throw std::invalid_argument("csp: unary value out of domain");
    }
    for (const auto& b : inst.binary) {
        if (b.var1 < 0 || b.var1 >= inst.n || b.var2 < 0 || b.var2 >= inst.n)
            throw std::invalid_argument("csp: binary var out of range");
        if (b.value < 0 || b.value > 2)
            throw std::invalid_argument("csp: binary value out of domain");
    }
}

inline bool satisfies(const CspInstance& inst, const std::vector<int>& f) {
    if (static_cast<int>(f.size()) != inst.n) return false;
    for (int v : f)
        if (v < 0 || v > 2) return false;
    for (const auto& u : inst.unary)
        if (f[u.var] == u.forbidden) return false;
    for (const auto& b : inst.binary)
        if (f[b.var1] == b.value && f[b.var2] != b.value) return false;
    return true;
}

// Express (x != y) per edge: for each value l, fresh variables a, b, c with
//   (x=l)->(a=l), (y=l)->(b=l), (c!=l), (c=l+1)->(a=l+1), (c=l+2)->(b=l+2)
// (arithmetic mod 3).  If x and y were both l, then a=b=l, but c must be
// l+1 or l+2 and would force a=l+1 or b=l+2.  Nine fresh variables and 15
// constraints per edge; satisfiable exactly when the graph is 3-colourable.
inline CspInstance three_col_to_csp(const Graph& g) {
    CspInstance out;
    out.n = g.vertex_count();
    for (const auto& [x, y] : g.edges()) {
        for (int l = 0; l < 3; ++l) {
            int a = out.n++, b = out.n++, c = out.n++;
            out.binary.push_back({x, a, l});
            out.binary.push_back({y, b, l});
            out.unary.push_back({c, l});
            out.binary.push_back({c, a, (l + 1) % 3});
            out.binary.push_back({c, b, (l + 2) % 3});
        }
    }
    return out;
}

// Give every otherwise-unconstrained variable a binary occurrence by pairing
// it with a fresh dummy via (x=0)->(dummy=0); the dummy is free to comply,
// so satisfiability is untouched.
inline CspInstance pad_csp(const CspInstance& inst) {
    check_csp(inst);
    CspInstance out = inst;
    std::vector<char> bound(inst.n, 0);
    for (const auto& b : inst.binary) bound[b.var1] = bound[b.var2] = 1;
    for (int v = 0; v < inst.n; ++v)
        if (!bound[v]) out.binary.push_back({v, out.n++, 0});
    return out;
}

// Steiner Forest instance realizing a CSP: hub vertices d0,d1,d2, one vertex
// per variable, and an adjacent pair (alpha_j, beta_j) per binary constraint.
struct HardInstance {
    Graph graph{0, {}};
    TerminalSet terminals;
    int budget = 0;             // n + 2*m2
    std::array<int, 3> d{};     // hub vertex ids
    std::vector<int> x;         // variable vertex ids
    std::vector<int> alpha, beta;  // per binary constraint
    CspInstance csp;            // the source instance
};

// Build the instance.  x_i is adjacent to d_l unless (x_i != l) is a
// constraint; for the j-th binary constraint (x=l)->(y=l), alpha_j and
// beta_j are adjacent to each other and to every hub except that alpha_j
// misses d_l; the terminal pairs are (x, alpha_j) and (y, beta_j).  A forest
// within budget n + 2*m2 exists exactly when the CSP is satisfiable.
inline HardInstance csp_to_sf(const CspInstance& inst) {
    check_csp(inst);
    std::vector<char> bound(inst.n, 0);
    for (const auto& b : inst.binary) bound[b.var1] = bound[b.var2] = 1;
    for (int v = 0; v < inst.n; ++v)
        if (!bound[v])
            throw std::invalid_argument(
                "csp_to_sf: variable " + std::to_string(v) +
                " appears in no binary constraint; apply pad_csp first");

    HardInstance out;
    out.csp = inst;
    const int m2 = static_cast<int>(inst.binary.size());
    out.d = {0, 1, 2};
    out.x.resize(inst.n);
    for (int i = 0; i < inst.n; ++i) out.x[i] = 3 + i;
    int next = 3 + inst.n;
    std::vector<Edge> edges;
    std::vector<Edge> pairs;
    std::vector<char> forbidden(static_cast<size_t>(inst.n) * 3, 0);
    for (const auto& u : inst.unary) forbidden[u.var * 3 + u.forbidden] = 1;
    for (int i = 0; i < inst.n; ++i)
        for (int l = 0; l < 3; ++l)
            if (!forbidden[i * 3 + l]) edges.push_back(make_edge(out.x[i], out.d[l]));
    for (int j = 0; j < m2; ++j) {
        int a = next++, b = next++;
        out.alpha.push_back(a);
        out.beta.push_back(b);
        edges.push_back(make_edge(a, b));
        for (int l = 0; l < 3; ++l) {
            if (l != inst.binary[j].value) edges.push_back(make_edge(a, out.d[l]));
            edges.push_back(make_edge(b, out.d[l]));
        }
        pairs.push_back(make_edge(out.x[inst.binary[j].var1], a));
        pairs.push_back(make_edge(out.x[inst.binary[j].var2], b));
    }
    out.graph = Graph(next, edges);
    out.terminals = TerminalSet(pairs);
    out.budget = inst.n + 2 * m2;
    return out;
}

// Read an assignment off a feasible forest: x_i takes the value l of the
// unique hub d_l sharing its forest component.  Returns nothing when the
// forest is not a feasible solution or some variable vertex fails to meet
// exactly one hub; for forests within budget the result provably satisfies
// the source CSP.
inline std::optional<std::vector<int>> decode_assignment(const HardInstance& h,
                                                         const SteinerForest& f) {
    if (!is_valid_forest(h.graph, h.terminals, f.edges)) return std::nullopt;
    int n = h.graph.vertex_count();
    std::vector<int> parent(n);
    for (int v = 0; v < n; ++v) parent[v] = v;
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const auto& [u, v] : f.edges) parent[find(u)] = find(v);
    // Sized off the vertex roles, not h.csp: instances rebuilt from annotated
    // files carry no CSP.
    std::vector<int> out(h.x.size());
    for (int i = 0; i < static_cast<int>(h.x.size()); ++i) {
        int root = find(h.x[i]), value = -1;
        for (int l = 0; l < 3; ++l)
            if (find(h.d[l]) == root) {
                if (value >= 0) return std::nullopt;  // hubs collapsed together
                value = l;
            }
        if (value < 0) return std::nullopt;
        out[i] = value;
    }
    return out;
}

// Does removing s from g leave only components with at most c vertices?
inline bool check_deletion_set(const Graph& g, const std::vector<int>& s, int c) {
    for (const auto& comp : components_after_removal(g, s))
        if (static_cast<int>(comp.size()) > c) return false;
    return true;
}

// Treewidth-3 certificate: adding the hub triangle makes the graph chordal
// with clique number 4, witnessed by a perfect elimination order in which
// every vertex has at most 3 earlier-surviving neighbours.  The alphas are
// simplicial first, then the betas, then the variable vertices (adjacent
// only to hubs), then the hubs.
inline bool check_tw3_certificate(const HardInstance& h) {
    Graph g = h.graph;
    for (int l = 0; l < 3; ++l)
        g = g.with_edge(h.d[l], h.d[(l + 1) % 3]);
    int n = g.vertex_count();
    std::vector<char> gone(n, 0);
    auto eliminate = [&](int v) {
        std::vector<int> live;
        for (int w : g.neighbors(v))
            if (!gone[w]) live.push_back(w);
        if (live.size() > 3) return false;
        for (size_t i = 0; i < live.size(); ++i)
            for (size_t j = i + 1; j < live.size(); ++j)
                if (!g.has_edge(live[i], live[j])) return false;
        gone[v] = 1;
        return true;
    };
    for (int v : h.alpha)
        if (!eliminate(v)) return false;
    for (int v : h.beta)
        if (!eliminate(v)) return false;
    for (int v : h.x)
        if (!eliminate(v)) return false;
    for (int v : h.d)
        if (!eliminate(v)) return false;
    return true;
}

// Exhaustive 3^n search; lexicographically first satisfying assignment, or
// nothing when unsatisfiable.
inline std::optional<std::vector<int>> solve_csp_bruteforce(const CspInstance& inst,
                                                            int cap = 16) {
    check_csp(inst);
    if (inst.n > cap) throw TooLargeError("csp brute force supports at most " +
                                          std::to_string(cap) + " variables");
    std::vector<int> f(inst.n, 0);
    while (true) {
        if (satisfies(inst, f)) return f;
        int i = inst.n - 1;
        while (i >= 0 && f[i] == 2) f[i--] = 0;
        if (i < 0) return std::nullopt;
        ++f[i];
    }
}

// --- CSP files --------------------------------------------------------------
//
// First data line "vars n", then one constraint per line:
//   "neq v d"     the unary constraint x_v != d
//   "imp v w d"   the binary constraint (x_v = d) -> (x_w = d)
// '#' starts a comment, as in the graph format.

inline CspInstance read_csp_stream(std::istream& in) {
    CspInstance out;
    std::string line;
    int line_no = 0;
    bool have_n = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::blank_or_comment(line)) continue;
        std::istringstream fields(line);
        std::string kw;
        fields >> kw;
        auto bad = [&](const char* what) {
            return ParseError("line " + std::to_string(line_no) + ": " + what);
        };
        if (!have_n) {
            if (kw != "vars" || !(fields >> out.n) || out.n < 0)
                throw bad("expected 'vars n'");
            have_n = true;
        } else if (kw == "neq") {
            UnaryConstraint u;
            if (!(fields >> u.var >> u.forbidden)) throw bad("expected 'neq v d'");
            out.unary.push_back(u);
        } else if (kw == "imp") {
            BinaryConstraint b;
            if (!(fields >> b.var1 >> b.var2 >> b.value))
                throw bad("expected 'imp v w d'");
            out.binary.push_back(b);
        } else {
            throw bad("unknown keyword");
        }
    }
    if (!have_n) throw ParseError("missing 'vars n' header");
    try {
        check_csp(out);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return out;
}

inline CspInstance read_csp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_csp_stream(in);
}

inline void write_csp_stream(std::ostream& out, const CspInstance& inst) {
    out << "vars " << inst.n << "\n";
    for (const auto& u : inst.unary) out << "neq " << u.var << " " << u.forbidden << "\n";
    for (const auto& b : inst.binary)
        out << "imp " << b.var1 << " " << b.var2 << " " << b.value << "\n";
}

inline void write_csp_file(const std::string& path, const CspInstance& inst) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    write_csp_stream(out, inst);
}

// --- role annotations -------------------------------------------------------
//
// Vertex roles serialized into graph files: hubs d0..d2, variable vertices
// x<i>, constraint vertices a<j>/b<j>. A graph file carrying the full role map
// plus the budget is enough to rebuild the instance skeleton and decode
// forests; the source CSP itself is not stored.

inline std::map<int, std::string> hard_roles(const HardInstance& h) {
    std::map<int, std::string> out;
    for (int l = 0; l < 3; ++l) out[h.d[l]] = "d" + std::to_string(l);
    for (int i = 0; i < static_cast<int>(h.x.size()); ++i)
        out[h.x[i]] = "x" + std::to_string(i);
    for (int j = 0; j < static_cast<int>(h.alpha.size()); ++j) {
        out[h.alpha[j]] = "a" + std::to_string(j);
        out[h.beta[j]] = "b" + std::to_string(j);
    }
    return out;
}

inline HardInstance hard_from_file(const GraphFile& gf, TerminalSet t) {
    HardInstance h;
    h.graph = gf.graph;
    h.terminals = std::move(t);
    h.budget = gf.budget;
    if (h.budget < 0) throw ParseError("missing '# budget' annotation");

    std::array<int, 3> d{-1, -1, -1};
    std::vector<int> xs, as, bs;
    auto place = [](std::vector<int>& slot, int idx, int v) {
        if (idx < 0) throw ParseError("negative role index");
        if (idx >= static_cast<int>(slot.size())) slot.resize(idx + 1, -1);
        if (slot[idx] != -1) throw ParseError("duplicate role index");
        slot[idx] = v;
    };
    for (const auto& [v, label] : gf.roles) {
        if (v < 0 || v >= gf.graph.vertex_count())
            throw ParseError("role for vertex outside the graph");
        if (label.size() < 2) throw ParseError("malformed role '" + label + "'");
        int idx;
        try {
            idx = std::stoi(label.substr(1));
        } catch (const std::exception&) {
            throw ParseError("malformed role '" + label + "'");
        }
        switch (label[0]) {
            case 'd':
                if (idx < 0 || idx > 2 || d[idx] != -1)
                    throw ParseError("bad hub role '" + label + "'");
                d[idx] = v;
                break;
            case 'x': place(xs, idx, v); break;
            case 'a': place(as, idx, v); break;
            case 'b': place(bs, idx, v); break;
            default: throw ParseError("unknown role '" + label + "'");
        }
    }
    if (d[0] < 0 || d[1] < 0 || d[2] < 0) throw ParseError("missing hub roles");
    for (int v : xs)
        if (v < 0) throw ParseError("gap in variable roles");
    if (as.size() != bs.size()) throw ParseError("mismatched a/b roles");
    for (size_t j = 0; j < as.size(); ++j)
        if (as[j] < 0 || bs[j] < 0) throw ParseError("gap in constraint roles");
    if (static_cast<int>(gf.roles.size()) != gf.graph.vertex_count())
        throw ParseError("every vertex needs a role");
    int n = static_cast<int>(xs.size()), m2 = static_cast<int>(as.size());
    if (h.budget != n + 2 * m2)
        throw ParseError("budget does not match the roles");
    h.d = d;
    h.x = std::move(xs);
    h.alpha = std::move(as);
    h.beta = std::move(bs);
    return h;
}

}  // namespace steiner
