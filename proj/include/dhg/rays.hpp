#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dhg/family.hpp"
#include "dhg/geodesic.hpp"
#include "dhg/report.hpp"

namespace dhg {

// Concrete ray/anti-ray handle inside a generated family. R(0), R(1), ... is
// the materialization order; for an anti-ray R(i) denotes the vertex i steps
// against the edges (edge R(i+1) -> R(i)).
struct ray_spec {
    family_ptr family;
    std::string name; // stable label for reports
    ray_kind kind = ray_kind::ray;
    std::vector<std::string> prefix;
    std::string series;

    // Content key: classification output ordering uses this, so results do
    // not depend on input order.
    std::string canonical_key() const;
    json to_json() const;
};

ray_spec ray_spec_from_decl(family_ptr f, const ray_decl& d);
ray_spec ray_spec_from_json(const json& j);
std::vector<ray_spec> builtin_rays(family_ptr f);

// Vertices R(0..up_to); expansion-needed error when the description runs off the
// truncation, edge/distinctness violations are domain errors.
std::vector<vertex_id> materialize(const ray_spec& r, const truncation& t, std::int64_t up_to);

// Longest materializable prefix within the truncation, capped.
std::vector<vertex_id> materialize_max(const ray_spec& r, const truncation& t, std::int64_t cap);

// Drops the first `shift` vertices; the result is an equivalent tail.
ray_spec tail_of(const ray_spec& r, std::int64_t shift);

struct geodesic_ray_check {
    bool geodesic = true;
    bool conclusive = true; // false when truncation distances were inexact
    std::pair<std::int64_t, std::int64_t> violation{-1, -1};
};

// True iff every subwalk up to the horizon realizes the truncation distance.
geodesic_ray_check is_geodesic_ray(const ray_spec& r, const truncation& t, std::int64_t horizon);

// Evidence check that a ray escapes: dist_sym(base, R(i)) over materialized i.
std::vector<ext_dist> escape_profile(const ray_spec& r, const truncation& t, std::int64_t horizon);

struct extraction_result {
    walk prefix;              // geodesic from the base vertex
    ext_dist corridor;        // empirical two-sided distance to the source ray
    std::int64_t targets = 0; // target points used
};

// Finite-scale geodesic-ray extraction: follow, at each step, the
// shortest-path DAG edge lying on the most base->target geodesics
// (ties: least vertex id).
extraction_result extract_geodesic_ray(const ray_spec& q, const truncation& t, vertex_id base,
                                       std::int64_t n_targets);

} // namespace dhg
