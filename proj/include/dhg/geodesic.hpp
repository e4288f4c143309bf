#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dhg/digraph.hpp"

namespace dhg {

using rational = boost::rational<std::int64_t>;

rational parse_rational(const std::string& s); // "p/q", "p", or decimal integer
std::string rational_str(const rational& r);

// A walk is a vertex sequence whose consecutive pairs are edges. Walks may
// repeat vertices; length = vertex count - 1.
using walk = std::vector<vertex_id>;

bool is_valid_walk(const digraph& g, const walk& w);
void check_walk(const digraph& g, const walk& w); // domain error if invalid
inline std::int64_t walk_length(const walk& w) { return static_cast<std::int64_t>(w.size()) - 1; }

// Shortest-path DAG from a source: for each reachable v, the predecessor set
// {u : edge u->v, d(src,u)+1 = d(src,v)}. Every source->v path in the DAG is
// a geodesic and every geodesic arises this way.
struct geodesic_dag {
    vertex_id source;
    std::vector<ext_dist> dist;
    std::vector<std::vector<vertex_id>> preds; // sorted

    geodesic_dag(const digraph& g, vertex_id source);
};

struct geodesic_list {
    std::vector<walk> walks;
    bool exhausted = true; // false when the cap cut enumeration short
    std::uint64_t total_count = 0;
};

inline constexpr std::uint64_t default_geodesic_cap = 10000;

// Number of distinct geodesics u->v, saturating at the cap sentinel.
std::uint64_t count_geodesics(const digraph& g, vertex_id u, vertex_id v,
                              std::uint64_t saturate = 1'000'000'000'000ULL);

// Distinct geodesics in deterministic order (DAG successors by ascending
// vertex id, depth-first). No-path error if dist(u,v) is infinite.
geodesic_list geodesics(const digraph& g, vertex_id u, vertex_id v,
                        std::uint64_t cap = default_geodesic_cap);

struct qg_result {
    bool ok;
    std::pair<std::int64_t, std::int64_t> violation; // first violating index pair
    ext_dist endpoint_dist;
};

// Checks the quasi-geodesic inequality len(i..j) <= gamma*d(w_i,w_j) + c for
// every ordered index pair of the walk; returns the lexicographically first
// violating pair on failure.
qg_result is_quasi_geodesic(const digraph& g, const walk& w, const rational& gamma, const rational& c);

// Least kappa with every vertex of p inside both the out-ball and in-ball of
// radius kappa around q's vertex set. Walks must be parallel (same start and
// end).
ext_dist stability_kappa(const digraph& g, const walk& p, const walk& q);

struct qi_spec {
    std::unordered_map<vertex_id, vertex_id> map; // g1 vertex -> g2 vertex
    rational gamma{1};
    rational c{0};
};

struct qi_violation {
    std::string kind; // "upper", "lower", "codensity"
    std::string x, y; // vertex names involved
    std::string detail;
};

struct qi_report {
    std::int64_t checked_pairs = 0;
    std::int64_t checked_codensity = 0;
    std::vector<qi_violation> violations;
    bool passed() const { return violations.empty(); }
};

// Verifies both quasi-isometric-embedding inequalities on every vertex pair
// of g1 and c-co-density on every vertex of g2.
qi_report qi_check(const digraph& g1, const digraph& g2, const qi_spec& spec);

} // namespace dhg
