#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"

namespace steiner {

// Path on r >= 1 vertices.
struct PathSpec {
    int r = 1;
    bool operator==(const PathSpec&) const = default;
};

// Spider with three legs of a, b, c edges hanging off a centre; legs sorted
// ascending, all >= 1. S(1,1,1) is the claw K_{1,3}.
struct ClawSpec {
    int a = 1, b = 1, c = 1;
    bool operator==(const ClawSpec&) const = default;
};

using ComponentSpec = std::variant<PathSpec, ClawSpec>;

// A disjoint union of paths and subdivided claws, e.g. "S1,1,1+P4". This is
// the class of graphs the classifier understands.
struct HSpec {
    std::vector<ComponentSpec> components;
    bool operator==(const HSpec&) const = default;
};

inline ClawSpec make_claw(int a, int b, int c) {
    int x[3] = {a, b, c};
    std::sort(x, x + 3);
    if (x[0] < 1) throw std::invalid_argument("claw legs must have length >= 1");
    return ClawSpec{x[0], x[1], x[2]};
}

inline int component_vertex_count(const ComponentSpec& c) {
    if (std::holds_alternative<PathSpec>(c)) return std::get<PathSpec>(c).r;
    const auto& s = std::get<ClawSpec>(c);
    return 1 + s.a + s.b + s.c;
}

inline int spec_vertex_count(const HSpec& h) {
    int n = 0;
    for (const auto& c : h.components) n += component_vertex_count(c);
    return n;
}

inline std::string format_component(const ComponentSpec& c) {
    if (std::holds_alternative<PathSpec>(c))
        return "P" + std::to_string(std::get<PathSpec>(c).r);
    const auto& s = std::get<ClawSpec>(c);
    return "S" + std::to_string(s.a) + "," + std::to_string(s.b) + "," + std::to_string(s.c);
}

inline std::string format_hspec(const HSpec& h) {
    std::string out;
    for (size_t i = 0; i < h.components.size(); ++i) {
        if (i) out += "+";
        out += format_component(h.components[i]);
    }
    return out.empty() ? "empty" : out;
}

// Accepts strings such as "P11", "S2,3,5" and sums like "S1,1,1+P4".
inline HSpec parse_hspec(const std::string& text) {
    HSpec out;
    size_t pos = 0;
    auto read_int = [&]() {
        size_t start = pos;
        while (pos < text.size() && isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) throw ParseError("expected a number in '" + text + "'");
        return std::stoi(text.substr(start, pos - start));
    };
    while (pos < text.size()) {
        char kind = text[pos];
        if (kind == 'P' || kind == 'p') {
            ++pos;
            int r = read_int();
            if (r < 1) throw ParseError("path must have at least one vertex");
            out.components.push_back(PathSpec{r});
        } else if (kind == 'S' || kind == 's') {
            ++pos;
            int a = read_int();
            if (pos >= text.size() || text[pos] != ',') throw ParseError("expected ',' in claw spec");
            ++pos;
            int b = read_int();
            if (pos >= text.size() || text[pos] != ',') throw ParseError("expected ',' in claw spec");
            ++pos;
            int c = read_int();
            out.components.push_back(make_claw(a, b, c));
        } else {
            throw ParseError(std::string("unexpected character '") + kind + "' in spec");
        }
        if (pos < text.size()) {
            if (text[pos] != '+') throw ParseError("expected '+' between components");
            ++pos;
            if (pos == text.size()) throw ParseError("trailing '+' in spec");
        }
    }
    if (out.components.empty()) throw ParseError("empty graph spec");
    return out;
}

// Concrete graph realizing the spec, components laid out in order.
inline Graph spec_to_graph(const HSpec& h) {
    std::vector<Edge> edges;
    int base = 0;
    for (const auto& c : h.components) {
        if (std::holds_alternative<PathSpec>(c)) {
            int r = std::get<PathSpec>(c).r;
            for (int i = 0; i + 1 < r; ++i) edges.emplace_back(base + i, base + i + 1);
            base += r;
        } else {
            const auto& s = std::get<ClawSpec>(c);
            int centre = base;
            int next = base + 1;
            for (int len : {s.a, s.b, s.c}) {
                int prev = centre;
                for (int i = 0; i < len; ++i) {
                    edges.emplace_back(prev, next);
                    prev = next++;
                }
            }
            base = next;
        }
    }
    return Graph(base, std::move(edges));
}

// Subgraph containment between single components. Path into path, path into
// claw (via the two longest legs), claw into claw (sorted leg dominance; a
// claw never fits in a path).
inline bool component_contains(const ComponentSpec& big, const ComponentSpec& small) {
    if (std::holds_alternative<PathSpec>(small)) {
        int r = std::get<PathSpec>(small).r;
        if (std::holds_alternative<PathSpec>(big)) return r <= std::get<PathSpec>(big).r;
        const auto& s = std::get<ClawSpec>(big);
        return r <= s.b + s.c + 1;
    }
    if (std::holds_alternative<PathSpec>(big)) return false;
    const auto& a = std::get<ClawSpec>(small);
    const auto& b = std::get<ClawSpec>(big);
    return a.a <= b.a && a.b <= b.b && a.c <= b.c;
}

// Decide whether the connected graph g is a path or a subdivided claw.
inline std::optional<ComponentSpec> recognize_component(const Graph& g) {
    int n = g.vertex_count();
    if (n == 0 || !is_connected(g)) return std::nullopt;
    if (g.edge_count() != n - 1) return std::nullopt;  // has a cycle
    int centre = -1;
    for (int v = 0; v < n; ++v) {
        if (g.degree(v) > 3) return std::nullopt;
        if (g.degree(v) == 3) {
            if (centre >= 0) return std::nullopt;  // two branch vertices
            centre = v;
        }
    }
    if (centre < 0) return ComponentSpec{PathSpec{n}};
    int legs[3], k = 0;
    for (int start : g.neighbors(centre)) {
        int len = 1, prev = centre, cur = start;
        while (g.degree(cur) == 2) {
            for (int w : g.neighbors(cur))
                if (w != prev) {
                    prev = cur;
                    cur = w;
                    break;
                }
            ++len;
        }
        legs[k++] = len;
    }
    return ComponentSpec{make_claw(legs[0], legs[1], legs[2])};
}

// Recognize a disjoint union of paths and subdivided claws; components
// reported in sorted order of their smallest vertex.
inline std::optional<HSpec> recognize_hspec(const Graph& g) {
    if (g.vertex_count() == 0) return std::nullopt;
    HSpec out;
    for (const auto& comp : connected_components(g)) {
        auto sub = induced_subgraph(g, comp);
        auto spec = recognize_component(sub.graph);
        if (!spec) return std::nullopt;
        out.components.push_back(*spec);
    }
    return out;
}

}  // namespace steiner
