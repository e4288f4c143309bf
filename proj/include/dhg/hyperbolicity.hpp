#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>

#include "dhg/digraph.hpp"
#include "dhg/geodesic.hpp"
#include "dhg/report.hpp"

namespace dhg {

// Geodesic triangle with designated sides. The thinness condition applies to
// the labeling (P, Q, R) when P's start is an endpoint of Q and P's end is an
// endpoint of R; construction validates that.
struct triangle_instance {
    walk side_p, side_q, side_r;
};

// Least delta for which this triangle's labeling is thin:
// max over p on P of min( min_{q in Q} d(q,p), min_{r in R} d(p,r) ).
std::int64_t thinness_of_triangle(const digraph& g, const dist_matrix& m, const triangle_instance& t);

struct delta_result {
    std::int64_t delta = 0;
    triangle_instance witness;
    std::array<vertex_id, 3> endpoints{-1, -1, -1};
    bool sampled = false; // sampled mode reports a lower bound
    std::int64_t triangles_checked = 0;
};

// Exact mode: max thinness over all qualifying triangles (all vertex triples
// with the required finite distances, all geodesic side choices, all
// qualifying labelings). Side choices are folded into an exact max-min pass
// over the shortest-path DAGs, so no explicit enumeration happens.
delta_result delta_of_exact(const digraph& g, const dist_matrix& m);
delta_result delta_of_exact(const digraph& g);

delta_result delta_of_sampled(const digraph& g, const dist_matrix& m, std::uint64_t seed, std::int64_t samples);

// Max observed finite distance between members of any r-ball, per radius.
struct b_function_profile {
    side profile_side = side::out;
    std::vector<std::int64_t> samples;

    std::int64_t rmax() const { return static_cast<std::int64_t>(samples.size()) - 1; }
    std::int64_t at(std::int64_t r) const; // domain error beyond rmax
    std::int64_t at_ceil(const rational& r) const;
};

b_function_profile b_profile(const digraph& g, const dist_matrix& m, side s, std::int64_t rmax);

// Constants derived from delta and the B-profiles. f is the single function
// serving both ball bounds (pointwise max of the two profiles).
struct derived_constants {
    std::int64_t delta = 0;
    b_function_profile prof_out;
    b_function_profile prof_in;

    std::int64_t f_at(std::int64_t r) const;
    std::int64_t kappa7() const;          // 6*delta + 2*delta*f(delta+1)
    std::int64_t big_k(std::int64_t M) const; // (2M+5d) + (2M+2d+1)*f(d+1)
    double eps_prime(double eps) const;   // e^{2*eps*kappa7}
    double max_admissible_eps() const;    // sup{eps : eps_prime(eps) < sqrt(2)}
    double auto_eps() const;              // largest eps with eps_prime <= 1.4, capped at 1
    json to_json() const;
};

// Computes exact delta and profiles up to radius delta+extra (>= what the
// audits need).
derived_constants compute_constants(const digraph& g, const dist_matrix& m, std::int64_t extra = 1);

// Length inequality on qualifying geodesic triangles and the reverse-distance
// bounds on mutually finite pairs.
audit_report audit_triangle_length_bounds(const digraph& g, const dist_matrix& m, std::int64_t delta,
                          const b_function_profile& f, const b_function_profile& gprof,
                          const rational& epsilon);

// Transitive triangles: third side inside the out- and in-ball of radius
// 6*delta + 2*delta*f(delta+1) around the composable pair.
audit_report audit_fellow_travel(const digraph& g, const dist_matrix& m, const derived_constants& c);

// Internal: max over x->y geodesics of min over path vertices of d(vertex, v)
// ("to" weights) or d(v, vertex) ("from" weights). Shared by delta, the
// fellow-travel audit, and tests.
class geodesic_extremes {
public:
    geodesic_extremes(const digraph& g, const dist_matrix& m);

    std::int64_t phi_to(vertex_id x, vertex_id y, vertex_id v) const;
    std::int64_t phi_from(vertex_id x, vertex_id y, vertex_id v) const;
    static constexpr std::int64_t unreachable = INT64_C(1) << 60;

    // Fill the cache for a pair; after prewarming every needed pair the
    // accessors are read-only and safe to share across threads.
    void prewarm(vertex_id x, vertex_id y) const { tables(x, y); }

    const std::vector<vertex_id>& on_geodesic(vertex_id x, vertex_id y) const;

    // A geodesic x->y realizing phi_to/phi_from at v (deterministic tie-break).
    walk witness_to(vertex_id x, vertex_id y, vertex_id v) const;
    walk witness_from(vertex_id x, vertex_id y, vertex_id v) const;
    // Deterministic geodesic x->y through p.
    walk through(vertex_id x, vertex_id y, vertex_id p) const;

private:
    struct pair_tables;
    const pair_tables& tables(vertex_id x, vertex_id y) const;
    const digraph& g_;
    const dist_matrix& m_;
    mutable std::unordered_map<std::uint64_t, std::shared_ptr<pair_tables>> cache_;
};

} // namespace dhg
