#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dhg/boundary.hpp"
#include "dhg/hyperbolicity.hpp"

namespace dhg {

// Finite base: every vertex of the working truncation has finite two-way
// distance to some member.
struct base_point_set {
    std::vector<vertex_id> members;
};

base_point_set make_base(const truncation& t, const std::vector<vertex_id>& members);
base_point_set default_base(const truncation& t);

// Working-set point: a vertex of the truncation or a boundary class given by
// its designated representative. The representative stands in for the class
// supremum (documented deviation).
struct working_point {
    bool is_vertex = true;
    vertex_id v = -1;
    ray_spec rep;
    std::string label;

    static working_point vertex(const truncation& t, vertex_id v);
    static working_point boundary(const ray_spec& rep);
};

struct working_set {
    std::vector<working_point> points;
    std::int64_t horizon = -1; // ray index horizon; -1 = truncation radius - 2
    std::int64_t n0 = -1;      // operative window start; -1 = horizon/2

    std::int64_t effective_horizon(const truncation& t) const;
    std::int64_t operative_n0(const truncation& t) const;
};

// Windowed liminf estimate of the base-to-geodesic distance. Values are the
// min over window pairs (i,j) of the min over vertices on any R(i)-Q(j)
// geodesic of dist_sym(s, vertex). A pair with no geodesic anywhere in the
// tail window is reported disconnected.
struct rho_estimate {
    bool disconnected = false;
    std::int64_t value = 0;
    bool exact = false;      // vertex-vertex (no window)
    bool stabilized = false; // consecutive windows agree
    std::array<std::int64_t, 3> windows{-1, -1, -1}; // H/4, H/2, 3H/4 (-1 = window empty)
    json witness;

    json to_json() const;
};

rho_estimate rho_s(const truncation& t, const dist_matrix& m, vertex_id s, const working_point& a,
                   const working_point& b, const working_set& ws);

// rho^eps of a single estimate; a disconnected pair sits at the maximal
// separation 1 (= e^0).
double rho_eps_of(const rho_estimate& e, double eps);
// Literal exponential map on extended values (e^{-inf} = 0).
double rho_eps_value(ext_dist rho, double eps);

// max over base members of rho_s^eps; gate eps_prime(eps) < sqrt(2).
double rho_S_eps(const truncation& t, const dist_matrix& m, const base_point_set& S,
                 const working_point& a, const working_point& b, const working_set& ws, double eps,
                 const derived_constants& c);

struct vis_matrix {
    std::vector<std::string> labels;
    std::vector<std::vector<rho_estimate>> rho_min;   // argmin over base members
    std::vector<std::vector<double>> rho_eps;         // max over base members
    std::vector<std::vector<bool>> stabilized;        // entrywise (or exact)
    std::vector<std::vector<double>> d;               // chain infimum over the working set
    std::vector<std::vector<int>> argmin_rho;         // base index attaining rho_min
    std::vector<std::vector<int>> argmax_eps;         // base index attaining rho_eps
    double eps = 0;
    std::int64_t n0 = 0, horizon = 0;

    json to_json() const;
};

// Pairwise rho estimates, rho_S^eps, and the all-pairs chain infimum
// restricted to chains through the working set (an upper bound on the true
// infimum). Gate: eps_prime(eps) < sqrt(2).
vis_matrix compute_vis_matrix(const truncation& t, const dist_matrix& m, const base_point_set& S,
                              const working_set& ws, double eps, const derived_constants& c);

audit_report audit_quasi_ultrametric(const vis_matrix& vm, const derived_constants& c);
audit_report audit_visual_sandwich(const vis_matrix& vm, const derived_constants& c);

enum class nbhd_side { minus, plus };

struct neighborhood_result {
    std::vector<vertex_id> members;
    std::vector<std::int64_t> tail_start; // least t with avoiding geodesics for all R(j), j >= t

    bool contains(vertex_id v) const;
};

// C-(omega,x,r): vertices y with avoiding y->z geodesics for every z on a
// tail of the class's ray representative (side minus); C+ uses an anti-ray
// representative and z->y geodesics.
neighborhood_result neighborhood(const truncation& t, const dist_matrix& m, const boundary_class& omega,
                                 vertex_id x, std::int64_t r, nbhd_side s, std::int64_t horizon);

bool avoiding_geodesic_exists(const digraph& g, const dist_matrix& m, vertex_id y, vertex_id z,
                              const std::vector<bool>& avoid);

std::vector<bool> ball_avoid(const digraph& g, const std::vector<vertex_id>& centers, std::int64_t r);

} // namespace dhg
