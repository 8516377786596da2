#pragma once

#include <array>
#include <optional>
#include <variant>
#include <vector>

#include "graph.hpp"
#include "hspec.hpp"
#include "paths.hpp"

namespace steiner {

// A claw embedding: centre plus three vertex-disjoint legs leaving it.
struct ClawEmbedding {
    int centre = -1;
    std::array<std::vector<int>, 3> legs;  // leg vertex sequences, centre excluded
};

using ComponentEmbedding = std::variant<PathEmbedding, ClawEmbedding>;

// Vertex-disjoint embedding of every component of a spec into g.
struct PatternEmbedding {
    std::vector<ComponentEmbedding> components;

    std::vector<int> vertices() const {
        std::vector<int> out;
        for (const auto& c : components) {
            if (std::holds_alternative<PathEmbedding>(c)) {
                const auto& p = std::get<PathEmbedding>(c);
                out.insert(out.end(), p.vertices.begin(), p.vertices.end());
            } else {
                const auto& cl = std::get<ClawEmbedding>(c);
                out.push_back(cl.centre);
                for (const auto& leg : cl.legs)
                    out.insert(out.end(), leg.begin(), leg.end());
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

namespace detail {

class PatternSearch {
public:
    PatternSearch(const Graph& g, const HSpec& spec) : g_(g), spec_(spec) {
        used_.assign(g.vertex_count(), 0);
        result_.components.resize(spec.components.size());
    }

    bool run() { return place_component(0); }
    PatternEmbedding result() { return std::move(result_); }

private:
    bool place_component(size_t idx) {
        if (idx == spec_.components.size()) return true;
        const auto& comp = spec_.components[idx];
        if (std::holds_alternative<PathSpec>(comp)) {
            int r = std::get<PathSpec>(comp).r;
            std::vector<int> path;
            for (int start = 0; start < g_.vertex_count(); ++start) {
                if (used_[start]) continue;
                used_[start] = 1;
                path.push_back(start);
                if (extend_path(path, r, idx)) return true;
                path.pop_back();
                used_[start] = 0;
            }
            return false;
        }
        const auto& claw = std::get<ClawSpec>(comp);
        for (int centre = 0; centre < g_.vertex_count(); ++centre) {
            if (used_[centre] || g_.degree(centre) < 3) continue;
            used_[centre] = 1;
            ClawEmbedding emb;
            emb.centre = centre;
            if (place_leg(emb, claw, 0, idx)) return true;
            used_[centre] = 0;
        }
        return false;
    }

    bool extend_path(std::vector<int>& path, int r, size_t idx) {
        if (static_cast<int>(path.size()) == r) {
            result_.components[idx] = PathEmbedding{path};
            return place_component(idx + 1);
        }
        for (int w : g_.neighbors(path.back())) {
            if (used_[w]) continue;
            used_[w] = 1;
            path.push_back(w);
            if (extend_path(path, r, idx)) return true;
            path.pop_back();
            used_[w] = 0;
        }
        return false;
    }

    bool place_leg(ClawEmbedding& emb, const ClawSpec& claw, int leg, size_t idx) {
        if (leg == 3) {
            result_.components[idx] = emb;
            return place_component(idx + 1);
        }
        int want = leg == 0 ? claw.a : leg == 1 ? claw.b : claw.c;
        return grow_leg(emb, claw, leg, want, emb.centre, idx);
    }

    bool grow_leg(ClawEmbedding& emb, const ClawSpec& claw, int leg, int want, int tip,
                  size_t idx) {
        if (want == 0) return place_leg(emb, claw, leg + 1, idx);
        for (int w : g_.neighbors(tip)) {
            if (used_[w]) continue;
            used_[w] = 1;
            emb.legs[leg].push_back(w);
            if (grow_leg(emb, claw, leg, want - 1, w, idx)) return true;
            emb.legs[leg].pop_back();
            used_[w] = 0;
        }
        return false;
    }

    const Graph& g_;
    const HSpec& spec_;
    std::vector<char> used_;
    PatternEmbedding result_;
};

}  // namespace detail

// First vertex-disjoint embedding of the spec into g in backtracking order,
// or nothing. Enumeration is deterministic: candidates ascend by vertex id.
inline std::optional<PatternEmbedding> find_pattern(const Graph& g, const HSpec& spec) {
    if (spec_vertex_count(spec) > g.vertex_count()) return std::nullopt;
    detail::PatternSearch search(g, spec);
    if (!search.run()) return std::nullopt;
    return search.result();
}

inline bool contains_pattern(const Graph& g, const HSpec& spec) {
    return find_pattern(g, spec).has_value();
}

}  // namespace steiner
