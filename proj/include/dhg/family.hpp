#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dhg/digraph.hpp"

namespace dhg {

enum class ray_kind { ray, anti_ray };

inline const char* ray_kind_name(ray_kind k) { return k == ray_kind::ray ? "ray" : "antiray"; }

// Finitely described ray or anti-ray: explicit prefix followed by a named
// per-family successor series. For an anti-ray the sequence R(0), R(1), ...
// walks against the edges: the edge R(i+1) -> R(i) must exist.
struct ray_decl {
    std::string name;
    ray_kind kind;
    std::vector<std::string> prefix;
    std::string series;
};

// Lazy out/in-neighbor oracle for an infinite digraph. Neighbor rules must be
// mutually consistent (v in out(u) iff u in in(v)) and always finite.
struct generated_family {
    std::string name;
    std::function<std::vector<std::string>(const std::string&)> out_rule;
    std::function<std::vector<std::string>(const std::string&)> in_rule;
    // Expansion origin (defaults used by expand()).
    std::vector<std::string> origin;
    // Base point set valid at the given truncation radius. For most families
    // this is radius-independent; oriented-tree3 has no radius-uniform finite
    // base and supplies a radius-dependent one.
    std::function<std::vector<std::string>(int)> base_for_radius;
    // Per-family successor rules, by series name.
    std::map<std::string, std::function<std::string(const std::string&)>> series;
    std::vector<ray_decl> rays;

    const ray_decl& ray_by_name(const std::string& rname) const;
    std::string step(const std::string& series_name, const std::string& v) const;
};

using family_ptr = std::shared_ptr<const generated_family>;

// Finite truncation of a generated family: all vertices within the given
// number of alternating out/in closure steps from the start set, with the
// induced edges. Frontier vertices may have incomplete neighbor lists in
// the graph; distance answers that could change under further expansion
// are flagged inexact.
struct truncation {
    family_ptr family;
    int radius = 0;
    digraph graph;
    std::vector<int> level;          // discovery level per vertex id
    std::vector<vertex_id> frontier; // sorted; level == radius
    std::vector<ext_dist> to_frontier;
    std::vector<ext_dist> from_frontier;

    bool is_frontier(vertex_id v) const { return level[static_cast<std::size_t>(v)] == radius; }

    // A truncation distance d(u,v) is exact for the infinite digraph when no
    // walk escaping through the frontier could beat it: any such walk costs
    // at least d(u, frontier) + 2 + d(frontier, v) inside the truncation.
    bool dist_exact(vertex_id u, vertex_id v, ext_dist d) const;

    // Base point set for visual-metric operations (satisfies the base
    // property at this radius).
    std::vector<vertex_id> base_ids() const;
    // Expansion origin: the designated center set for avoidance balls in the
    // boundary and end relations.
    std::vector<vertex_id> origin_ids() const;
};

truncation expand(family_ptr f, int radius);
truncation expand(family_ptr f, int radius, const std::vector<std::string>& start);

// Builtin family registry (bit-exact CLI identifiers).
const std::vector<std::string>& family_names();
family_ptr get_family(const std::string& name); // usage error if unknown

} // namespace dhg
