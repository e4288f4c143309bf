#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dhg/rays.hpp"
#include "dhg/report.hpp"

namespace dhg {

enum class verdict_outcome { holds, fails_exhausted, inconclusive };

// Outcome of a finite-horizon test of an infinitary relation. A positive
// verdict carries an actual witness path; a negative one certifies that the
// search space inside the truncation was exhausted with margin.
struct resolution_verdict {
    std::string relation;
    std::int64_t path_bound = -1; // M; -1 = unbounded (end relation)
    std::int64_t avoid_radius = 0;
    std::int64_t trunc_radius = 0;
    verdict_outcome outcome = verdict_outcome::inconclusive;
    walk witness;     // holds only
    std::string note; // inconclusive reason or caveat

    bool holds() const { return outcome == verdict_outcome::holds; }
    json to_json(const digraph& g) const;
};

struct resolution_params {
    std::int64_t M = 4;       // path length bound (boundary relation)
    std::int64_t r = 6;       // avoidance radius
    std::int64_t horizon = -1; // ray materialization cap; -1 = truncation radius
};

// Directed r1->r2 path of length at most M avoiding the out- and in-balls of
// radius r around the base set, searched inside the truncation. The full
// relation quantifies over every center and radius; this fixes the base set
// and one radius, so callers sweep r.
resolution_verdict relate_leq(const truncation& t, const ray_spec& r1, const ray_spec& r2,
                              const std::vector<vertex_id>& base, const resolution_params& p);

// Both directions of relate_leq.
std::pair<resolution_verdict, resolution_verdict> relate_equiv(const truncation& t, const ray_spec& r1,
                                                               const ray_spec& r2,
                                                               const std::vector<vertex_id>& base,
                                                               const resolution_params& p);

struct boundary_class {
    std::vector<ray_spec> representatives;
    bool has_ray = false;
    bool has_anti_ray = false;
    json to_json() const;
};

struct classification {
    std::vector<boundary_class> classes;
    // leq[i][j]: the induced relation between classes i and j (all cross
    // pair verdicts agree; disagreements mark the result inconclusive).
    std::vector<std::vector<bool>> leq;
    std::vector<std::string> notes; // inconclusive findings, empty = clean
    // raw pairwise verdicts over the input rays, row-major
    std::vector<std::vector<resolution_verdict>> ray_verdicts;

    bool inconclusive() const { return !notes.empty(); }
    json to_json(const digraph& g) const;
};

// Partitions the rays by mutual relatedness at the given resolution and
// computes the induced order. Output ordering is canonical in the ray
// content, independent of input order.
classification classify(const truncation& t, const std::vector<ray_spec>& rays,
                        const std::vector<vertex_id>& base, const resolution_params& p);

// End relation: r1->r2 path of any length avoiding the balls, inside the
// truncation. Valid as an end characterization only on locally finite
// digraphs; negative verdicts are truncation-relative.
resolution_verdict relate_end(const truncation& t, const ray_spec& r1, const ray_spec& r2,
                              const std::vector<vertex_id>& base, const resolution_params& p);

// Same machinery for the end relation (no length bound).
classification classify_ends(const truncation& t, const std::vector<ray_spec>& rays,
                             const std::vector<vertex_id>& base, const resolution_params& p);

// Strict-order chain bound and ray/anti-ray content restriction on compared
// classes.
audit_report audit_no_3_chain(const classification& c);

} // namespace dhg
