#pragma once

// Complexity classification of Steiner Forest on H-subgraph-free graphs.
//
// For a connected pattern H that is a path or a subdivided claw, the problem
// is solvable in polynomial time exactly when H fits inside one of six
// maximal tractable patterns
//
//     P11   S1,3,6   S2,2,7   S2,3,5   S2,4,4   S3,3,4
//
// and is NP-complete otherwise.  Every NP-complete verdict is justified by a
// hard generator contained in H: graph classes excluding 4P3, or excluding
// all of 3K1,3, 2K1,3+P4, K1,3+2P4, 3P4, S1,1,8, S1,4,5 at once, still
// admit NP-hard instances, so any H containing one of these patterns leaves
// the H-free class hard.  Patterns outside the path/claw world are always
// NP-complete, even for Steiner Tree.
//
// Disconnected patterns are classified when an explicit containment settles
// them; adding P2 components to a tractable pattern also stays tractable.
// Anything else raises OutOfDichotomyError.

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "steiner/errors.hpp"
#include "steiner/graph.hpp"
#include "steiner/hspec.hpp"
#include "steiner/pattern.hpp"

namespace steiner {

enum class Complexity { Poly, NPComplete };

inline const char* to_string(Complexity c) {
    return c == Complexity::Poly ? "Poly" : "NPComplete";
}

// Outcome of a classification: the answer plus the single rule that decided
// it.  `witness` is a containment ("H<=S2,3,5", "4P3<=H", "not-in-S") or a
// parameter-range case ("c=2,k<=2").
struct Verdict {
    Complexity answer;
    std::string witness;
    bool operator==(const Verdict&) const = default;
};

// a fits inside b, both single path/claw components.
inline bool spec_contains(const ComponentSpec& a, const ComponentSpec& b) {
    return component_contains(b, a);
}

// The six maximal patterns whose exclusion makes the problem tractable.
inline const std::vector<HSpec>& maximal_poly_specs() {
    static const std::vector<HSpec> specs = {
        HSpec{{PathSpec{11}}},      HSpec{{make_claw(1, 3, 6)}},
        HSpec{{make_claw(2, 2, 7)}}, HSpec{{make_claw(2, 3, 5)}},
        HSpec{{make_claw(2, 4, 4)}}, HSpec{{make_claw(3, 3, 4)}},
    };
    return specs;
}

// Patterns whose presence inside H certifies NP-completeness of the
// H-subgraph-free class.  The hard constructions avoid each of these, so a
// pattern containing one is avoided by those constructions as well.
inline const std::vector<HSpec>& hard_generator_specs() {
    static const std::vector<HSpec> specs = {
        HSpec{{PathSpec{3}, PathSpec{3}, PathSpec{3}, PathSpec{3}}},  // 4P3
        HSpec{{PathSpec{4}, PathSpec{4}, PathSpec{4}}},               // 3P4
        HSpec{{make_claw(1, 1, 8)}},
        HSpec{{make_claw(1, 4, 5)}},
        HSpec{{make_claw(1, 1, 1), make_claw(1, 1, 1), make_claw(1, 1, 1)}},
        HSpec{{make_claw(1, 1, 1), make_claw(1, 1, 1), PathSpec{4}}},
        HSpec{{make_claw(1, 1, 1), PathSpec{4}, PathSpec{4}}},
    };
    return specs;
}

// "4P3", "2S1,1,1+P4": like format_hspec but with repeats run-length coded.
inline std::string format_hspec_compact(const HSpec& h) {
    if (h.components.empty()) return "empty";
    std::string out;
    for (size_t i = 0; i < h.components.size();) {
        size_t j = i;
        while (j < h.components.size() && h.components[j] == h.components[i]) ++j;
        if (!out.empty()) out += '+';
        if (j - i > 1) out += std::to_string(j - i);
        out += format_component(h.components[i]);
        i = j;
    }
    return out;
}

namespace detail {

// Case list for a connected pattern.  Claw legs arrive sorted ascending, so
// each (a, b, c) range below is hit exactly once; every verdict cites either
// the tractable pattern containing H or the hard generator inside H.
inline Verdict classify_component(const ComponentSpec& comp) {
    using enum Complexity;
    if (std::holds_alternative<PathSpec>(comp)) {
        if (std::get<PathSpec>(comp).r <= 11) return {Poly, "H<=P11"};
        return {NPComplete, "3P4<=H"};  // P12 splits into three P4
    }
    const auto& s = std::get<ClawSpec>(comp);
    const int a = s.a, b = s.b, c = s.c;
    if (a >= 4) return {NPComplete, "3P4<=H"};  // one P4 per leg
    if (a == 3) {
        if (b >= 4 || c >= 5) return {NPComplete, "4P3<=H"};
        return {Poly, "H<=S3,3,4"};
    }
    if (a == 2) {
        if (c >= 8) return {NPComplete, "S1,1,8<=H"};
        if (c >= 6) {
            if (b >= 3) return {NPComplete, "4P3<=H"};
            return {Poly, "H<=S2,2,7"};
        }
        if (c == 5) {
            if (b >= 4) return {NPComplete, "S1,4,5<=H"};
            return {Poly, "H<=S2,3,5"};
        }
        return {Poly, "H<=S2,4,4"};
    }
    // a == 1
    if (c >= 8) return {NPComplete, "S1,1,8<=H"};
    if (c == 7) {
        if (b >= 3) return {NPComplete, "4P3<=H"};
        return {Poly, "H<=S2,2,7"};
    }
    if (c >= 5) {
        if (b >= 4) return {NPComplete, "S1,4,5<=H"};
        return {Poly, "H<=S1,3,6"};
    }
    return {Poly, "H<=S2,4,4"};
}

}  // namespace detail

// Classify Steiner Forest restricted to graphs with no subgraph isomorphic
// to the pattern h.  Connected patterns are fully decided.  A disconnected
// pattern is decided when it fits one of the six tractable patterns (plus
// optionally discarded P2/P1 components), or contains a hard generator;
// otherwise OutOfDichotomyError is raised.  With connected_only set,
// disconnected input is rejected up front instead.
inline Verdict classify_h(const HSpec& h, bool connected_only = false) {
    if (connected_only && h.components.size() > 1)
        throw std::invalid_argument("classify_h: pattern is not connected");
    if (h.components.empty()) return {Complexity::Poly, "H<=P11"};
    if (h.components.size() == 1) return detail::classify_component(h.components[0]);

    for (const HSpec& m : maximal_poly_specs())
        if (contains_pattern(spec_to_graph(m), h))
            return {Complexity::Poly, "H<=" + format_hspec_compact(m)};

    // Tractability survives adding P2 components (and P1 sits inside P2):
    // drop them and retry.  Keep one component so the base stays nonempty.
    HSpec rest;
    int stripped = 0;
    for (const ComponentSpec& comp : h.components) {
        if (std::holds_alternative<PathSpec>(comp) && std::get<PathSpec>(comp).r <= 2)
            ++stripped;
        else
            rest.components.push_back(comp);
    }
    if (rest.components.empty()) {
        rest.components.push_back(PathSpec{2});
        --stripped;
    }
    if (stripped > 0) {
        for (const HSpec& m : maximal_poly_specs())
            if (contains_pattern(spec_to_graph(m), rest))
                return {Complexity::Poly, "H<=" + format_hspec_compact(m) + "+" +
                                              std::to_string(stripped) + "P2"};
    }

    Graph hg = spec_to_graph(h);
    for (const HSpec& w : hard_generator_specs())
        if (contains_pattern(hg, w))
            return {Complexity::NPComplete, format_hspec_compact(w) + "<=H"};

    throw OutOfDichotomyError("no rule classifies " + format_hspec(h));
}

// Graph front end: recognize the pattern first.  A graph that is not a
// disjoint union of paths and subdivided claws is NP-complete outright.
inline Verdict classify_h(const Graph& g, bool connected_only = false) {
    if (g.vertex_count() == 0) return {Complexity::Poly, "H<=P11"};
    if (connected_only && !is_connected(g))
        throw std::invalid_argument("classify_h: pattern is not connected");
    auto spec = recognize_hspec(g);
    if (!spec) return {Complexity::NPComplete, "not-in-S"};
    return classify_h(*spec, connected_only);
}

// Classify Steiner Forest on graphs that have a set of at most k vertices
// whose removal leaves components with at most c vertices each.
inline Verdict classify_deletion(int c, int k) {
    if (c < 1 || k < 0)
        throw std::invalid_argument("classify_deletion: need c >= 1 and k >= 0");
    using enum Complexity;
    if (k == 0) return {Poly, "k=0"};
    if (c == 1) return {Poly, "c=1"};
    if (c == 2 && k <= 2) return {Poly, "c=2,k<=2"};
    if (k == 1) return {Poly, "k=1"};
    if (c == 2) return {NPComplete, "c=2,k>=3"};
    return {NPComplete, "c>=3,k>=2"};
}

}  // namespace steiner
