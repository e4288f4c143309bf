#include "dhg/hyperbolicity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "dhg/errors.hpp"

namespace dhg {

namespace {

std::uint64_t pair_key(vertex_id x, vertex_id y) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
           static_cast<std::uint32_t>(y);
}

} // namespace

struct geodesic_extremes::pair_tables {
    std::vector<vertex_id> nodes;          // on-geodesic vertices, by (dist from x, id)
    std::vector<std::vector<int>> preds;   // indices into nodes
    std::vector<int> node_index;           // vertex -> index in nodes, -1 otherwise
    std::vector<std::int64_t> phi_to;      // per target vertex v
    std::vector<std::int64_t> phi_from;
};

geodesic_extremes::geodesic_extremes(const digraph& g, const dist_matrix& m) : g_(g), m_(m) {}

const geodesic_extremes::pair_tables& geodesic_extremes::tables(vertex_id x, vertex_id y) const {
    auto it = cache_.find(pair_key(x, y));
    if (it != cache_.end()) return *it->second;
    ext_dist total = m_.at(x, y);
    if (total.is_infinite()) throw domain_error("no geodesic between requested endpoints");

    auto t = std::make_shared<pair_tables>();
    std::size_t n = g_.vertex_count();
    for (std::size_t v = 0; v < n; ++v) {
        ext_dist a = m_.at(x, static_cast<vertex_id>(v));
        ext_dist b = m_.at(static_cast<vertex_id>(v), y);
        if (a.is_finite() && b.is_finite() && a.value() + b.value() == total.value())
            t->nodes.push_back(static_cast<vertex_id>(v));
    }
    std::sort(t->nodes.begin(), t->nodes.end(), [&](vertex_id a, vertex_id b) {
        ext_dist da = m_.at(x, a), db = m_.at(x, b);
        if (da.value() != db.value()) return da.value() < db.value();
        return a < b;
    });
    t->node_index.assign(n, -1);
    for (std::size_t i = 0; i < t->nodes.size(); ++i)
        t->node_index[static_cast<std::size_t>(t->nodes[i])] = static_cast<int>(i);
    t->preds.resize(t->nodes.size());
    for (std::size_t i = 0; i < t->nodes.size(); ++i) {
        vertex_id u = t->nodes[i];
        for (vertex_id p : g_.in_neighbors(u)) {
            int pi = t->node_index[static_cast<std::size_t>(p)];
            if (pi >= 0 && m_.at(x, p).value() + 1 == m_.at(x, u).value()) t->preds[i].push_back(pi);
        }
    }

    // DP per target v: best over x->y geodesics of the min over path vertices
    // of d(vertex, v) resp. d(v, vertex).
    t->phi_to.assign(n, 0);
    t->phi_from.assign(n, 0);
    std::vector<std::int64_t> M(t->nodes.size());
    for (int dir = 0; dir < 2; ++dir) {
        for (std::size_t v = 0; v < n; ++v) {
            for (std::size_t i = 0; i < t->nodes.size(); ++i) {
                vertex_id u = t->nodes[i];
                ext_dist w = dir == 0 ? m_.at(u, static_cast<vertex_id>(v))
                                      : m_.at(static_cast<vertex_id>(v), u);
                std::int64_t wu = w.is_finite() ? w.value() : unreachable;
                if (t->preds[i].empty()) {
                    M[i] = wu; // the source x
                } else {
                    std::int64_t best = -1;
                    for (int pi : t->preds[i]) best = std::max(best, M[static_cast<std::size_t>(pi)]);
                    M[i] = std::min(wu, best);
                }
            }
            std::int64_t res = M[static_cast<std::size_t>(t->node_index[static_cast<std::size_t>(y)])];
            (dir == 0 ? t->phi_to : t->phi_from)[v] = res;
        }
    }

    auto [pos, _] = cache_.emplace(pair_key(x, y), t);
    return *pos->second;
}

std::int64_t geodesic_extremes::phi_to(vertex_id x, vertex_id y, vertex_id v) const {
    return tables(x, y).phi_to[static_cast<std::size_t>(v)];
}

std::int64_t geodesic_extremes::phi_from(vertex_id x, vertex_id y, vertex_id v) const {
    return tables(x, y).phi_from[static_cast<std::size_t>(v)];
}

const std::vector<vertex_id>& geodesic_extremes::on_geodesic(vertex_id x, vertex_id y) const {
    return tables(x, y).nodes;
}

walk geodesic_extremes::through(vertex_id x, vertex_id y, vertex_id p) const {
    const pair_tables& t = tables(x, y);
    if (t.node_index[static_cast<std::size_t>(p)] < 0)
        throw domain_error("vertex not on any geodesic for the pair");
    walk back{p};
    vertex_id cur = p;
    while (cur != x) {
        const auto& preds = t.preds[static_cast<std::size_t>(t.node_index[static_cast<std::size_t>(cur)])];
        vertex_id best = t.nodes[static_cast<std::size_t>(preds.front())];
        for (int pi : preds) best = std::min(best, t.nodes[static_cast<std::size_t>(pi)]);
        back.push_back(best);
        cur = best;
    }
    std::reverse(back.begin(), back.end());
    cur = p;
    while (cur != y) {
        vertex_id best = -1;
        for (vertex_id z : g_.out_neighbors(cur)) {
            if (t.node_index[static_cast<std::size_t>(z)] >= 0 &&
                m_.at(x, z).value() == m_.at(x, cur).value() + 1) {
                best = best < 0 ? z : std::min(best, z);
            }
        }
        back.push_back(best);
        cur = best;
    }
    return back;
}

namespace {

walk backtrack_phi(const digraph& g, const dist_matrix& m, vertex_id x, vertex_id y, vertex_id v, bool to_weights) {
    // Recomputes the max-min DP and extracts one maximizing geodesic.
    ext_dist total = m.at(x, y);
    std::vector<vertex_id> nodes;
    for (std::size_t u = 0; u < g.vertex_count(); ++u) {
        ext_dist a = m.at(x, static_cast<vertex_id>(u));
        ext_dist b = m.at(static_cast<vertex_id>(u), y);
        if (a.is_finite() && b.is_finite() && a.value() + b.value() == total.value())
            nodes.push_back(static_cast<vertex_id>(u));
    }
    std::sort(nodes.begin(), nodes.end(), [&](vertex_id a, vertex_id b) {
        if (m.at(x, a).value() != m.at(x, b).value()) return m.at(x, a).value() < m.at(x, b).value();
        return a < b;
    });
    std::unordered_map<vertex_id, std::int64_t> M;
    std::unordered_map<vertex_id, vertex_id> choice;
    for (vertex_id u : nodes) {
        ext_dist w = to_weights ? m.at(u, v) : m.at(v, u);
        std::int64_t wu = w.is_finite() ? w.value() : geodesic_extremes::unreachable;
        if (u == x) {
            M[u] = wu;
            continue;
        }
        std::int64_t best = -1;
        vertex_id bestp = -1;
        for (vertex_id p : g.in_neighbors(u)) {
            auto it = M.find(p);
            if (it == M.end() || m.at(x, p).value() + 1 != m.at(x, u).value()) continue;
            if (it->second > best || (it->second == best && (bestp < 0 || p < bestp))) {
                best = it->second;
                bestp = p;
            }
        }
        M[u] = std::min(wu, best);
        choice[u] = bestp;
    }
    walk w{y};
    vertex_id cur = y;
    while (cur != x) {
        cur = choice.at(cur);
        w.push_back(cur);
    }
    std::reverse(w.begin(), w.end());
    return w;
}

} // namespace

walk geodesic_extremes::witness_to(vertex_id x, vertex_id y, vertex_id v) const {
    return backtrack_phi(g_, m_, x, y, v, true);
}

walk geodesic_extremes::witness_from(vertex_id x, vertex_id y, vertex_id v) const {
    return backtrack_phi(g_, m_, x, y, v, false);
}

std::int64_t thinness_of_triangle(const digraph& g, const dist_matrix& m, const triangle_instance& t) {
    for (const walk* s : {&t.side_p, &t.side_q, &t.side_r}) {
        check_walk(g, *s);
        ext_dist d = m.at(s->front(), s->back());
        if (d.is_infinite() || d.value() != walk_length(*s))
            throw domain_error("triangle side is not a geodesic");
    }
    const walk& P = t.side_p;
    const walk& Q = t.side_q;
    const walk& R = t.side_r;
    bool qual = (P.front() == Q.front() || P.front() == Q.back()) &&
                (P.back() == R.front() || P.back() == R.back());
    if (!qual) throw domain_error("triangle labeling does not satisfy the orientation condition");
    std::int64_t worst = 0;
    for (vertex_id p : P) {
        ext_dist alpha = ext_dist::infinity(); // reachability from Q
        for (vertex_id q : Q) alpha = ext_dist::min(alpha, m.at(q, p));
        ext_dist beta = ext_dist::infinity(); // reach into R
        for (vertex_id r : R) beta = ext_dist::min(beta, m.at(p, r));
        ext_dist v = ext_dist::min(alpha, beta);
        worst = std::max(worst, v.is_finite() ? v.value() : geodesic_extremes::unreachable);
    }
    return worst;
}

namespace {

// Directed side candidates for an unordered endpoint pair.
std::vector<std::pair<vertex_id, vertex_id>> side_dirs(const dist_matrix& m, vertex_id a, vertex_id b) {
    std::vector<std::pair<vertex_id, vertex_id>> out;
    if (a == b) {
        out.emplace_back(a, a);
        return out;
    }
    if (m.at(a, b).is_finite()) out.emplace_back(a, b);
    if (m.at(b, a).is_finite()) out.emplace_back(b, a);
    return out;
}

constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};

struct delta_scan {
    const digraph& g;
    const dist_matrix& m;
    geodesic_extremes& ex;
    delta_result best;

    void consider_triple(vertex_id a, vertex_id b, vertex_id c) {
        auto d1 = side_dirs(m, a, b);
        auto d2 = side_dirs(m, b, c);
        auto d3 = side_dirs(m, a, c);
        if (d1.empty() || d2.empty() || d3.empty()) return;
        std::array<std::pair<vertex_id, vertex_id>, 3> sides;
        for (const auto& s1 : d1) {
            sides[0] = s1;
            for (const auto& s2 : d2) {
                sides[1] = s2;
                for (const auto& s3 : d3) {
                    sides[2] = s3;
                    for (const auto& perm : perms) {
                        const auto& P = sides[static_cast<std::size_t>(perm[0])];
                        const auto& Q = sides[static_cast<std::size_t>(perm[1])];
                        const auto& R = sides[static_cast<std::size_t>(perm[2])];
                        if (!(P.first == Q.first || P.first == Q.second)) continue;
                        if (!(P.second == R.first || P.second == R.second)) continue;
                        ++best.triangles_checked;
                        for (vertex_id p : ex.on_geodesic(P.first, P.second)) {
                            std::int64_t val = std::min(ex.phi_to(Q.first, Q.second, p),
                                                        ex.phi_from(R.first, R.second, p));
                            if (val > best.delta) {
                                best.delta = val;
                                best.endpoints = {a, b, c};
                                best.witness.side_p = ex.through(P.first, P.second, p);
                                best.witness.side_q = ex.witness_to(Q.first, Q.second, p);
                                best.witness.side_r = ex.witness_from(R.first, R.second, p);
                            }
                        }
                    }
                }
            }
        }
    }
};

} // namespace

delta_result delta_of_exact(const digraph& g, const dist_matrix& m) {
    geodesic_extremes ex(g, m);
    std::int64_t n = static_cast<std::int64_t>(g.vertex_count());
    int workers = worker_count();
    delta_result best;
    if (workers <= 1 || n < 24) {
        delta_scan scan{g, m, ex, {}};
        for (vertex_id a = 0; a < n; ++a)
            for (vertex_id b = a; b < n; ++b)
                for (vertex_id c = b; c < n; ++c) scan.consider_triple(a, b, c);
        best = std::move(scan.best);
    } else {
        // prewarm every finite pair so the scan only reads the cache
        for (vertex_id a = 0; a < n; ++a)
            for (vertex_id b = 0; b < n; ++b)
                if (m.at(a, b).is_finite()) ex.prewarm(a, b);
        std::vector<delta_result> partials(static_cast<std::size_t>(workers));
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                delta_scan scan{g, m, ex, {}};
                for (vertex_id a = w; a < n; a += workers)
                    for (vertex_id b = a; b < n; ++b)
                        for (vertex_id c = b; c < n; ++c) scan.consider_triple(a, b, c);
                partials[static_cast<std::size_t>(w)] = std::move(scan.best);
            });
        }
        for (auto& th : pool) th.join();
        // merge in the order of the smallest first endpoint so the witness
        // matches the serial scan
        std::sort(partials.begin(), partials.end(), [](const delta_result& x, const delta_result& y) {
            return x.endpoints[0] < y.endpoints[0];
        });
        std::int64_t total = 0;
        for (const auto& p : partials) total += p.triangles_checked;
        for (const auto& p : partials)
            if (p.delta > best.delta) best = p;
        best.triangles_checked = total;
    }
    if (best.endpoints[0] < 0 && n > 0) {
        // no qualifying triangle beat 0; report a degenerate witness
        best.endpoints = {0, 0, 0};
        best.witness = {{0}, {0}, {0}};
    }
    return best;
}

delta_result delta_of_exact(const digraph& g) {
    dist_matrix m(g);
    return delta_of_exact(g, m);
}

delta_result delta_of_sampled(const digraph& g, const dist_matrix& m, std::uint64_t seed, std::int64_t samples) {
    geodesic_extremes ex(g, m);
    delta_scan scan{g, m, ex, {}};
    scan.best.sampled = true;
    std::mt19937_64 rng(seed);
    std::int64_t n = static_cast<std::int64_t>(g.vertex_count());
    if (n == 0) return scan.best;
    for (std::int64_t i = 0; i < samples; ++i) {
        std::array<vertex_id, 3> t{static_cast<vertex_id>(rng() % static_cast<std::uint64_t>(n)),
                                   static_cast<vertex_id>(rng() % static_cast<std::uint64_t>(n)),
                                   static_cast<vertex_id>(rng() % static_cast<std::uint64_t>(n))};
        std::sort(t.begin(), t.end());
        scan.consider_triple(t[0], t[1], t[2]);
    }
    if (scan.best.endpoints[0] < 0) {
        scan.best.endpoints = {0, 0, 0};
        scan.best.witness = {{0}, {0}, {0}};
    }
    return scan.best;
}

std::int64_t b_function_profile::at(std::int64_t r) const {
    if (r < 0) throw domain_error("profile radius must be nonnegative");
    if (r > rmax())
        throw domain_error("profile covers radius " + std::to_string(rmax()) +
                           ", requested " + std::to_string(r));
    return samples[static_cast<std::size_t>(r)];
}

std::int64_t b_function_profile::at_ceil(const rational& r) const {
    std::int64_t num = r.numerator(), den = r.denominator();
    std::int64_t c = num >= 0 ? (num + den - 1) / den : num / den;
    return at(c);
}

b_function_profile b_profile(const digraph& g, const dist_matrix& m, side s, std::int64_t rmax) {
    if (rmax < 0) throw precondition_error("b_profile: rmax must be nonnegative");
    b_function_profile prof;
    prof.profile_side = s;
    prof.samples.assign(static_cast<std::size_t>(rmax) + 1, 0);
    std::size_t n = g.vertex_count();
    for (std::size_t x = 0; x < n; ++x) {
        // gather members by radius once per center
        std::vector<std::pair<std::int64_t, vertex_id>> members;
        for (std::size_t v = 0; v < n; ++v) {
            ext_dist d = s == side::out ? m.at(static_cast<vertex_id>(x), static_cast<vertex_id>(v))
                                        : m.at(static_cast<vertex_id>(v), static_cast<vertex_id>(x));
            if (d.is_finite() && d.value() <= rmax) members.emplace_back(d.value(), static_cast<vertex_id>(v));
        }
        std::sort(members.begin(), members.end());
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = 0; j < members.size(); ++j) {
                if (i == j) continue;
                std::int64_t need = std::max(members[i].first, members[j].first);
                ext_dist d = m.at(members[i].second, members[j].second);
                if (d.is_finite() && need <= rmax) {
                    auto& slot = prof.samples[static_cast<std::size_t>(need)];
                    slot = std::max(slot, d.value());
                }
            }
        }
    }
    for (std::size_t r = 1; r < prof.samples.size(); ++r)
        prof.samples[r] = std::max(prof.samples[r], prof.samples[r - 1]);
    return prof;
}

std::int64_t derived_constants::f_at(std::int64_t r) const {
    return std::max(prof_out.at(r), prof_in.at(r));
}

std::int64_t derived_constants::kappa7() const { return 6 * delta + 2 * delta * f_at(delta + 1); }

std::int64_t derived_constants::big_k(std::int64_t M) const {
    return (2 * M + 5 * delta) + (2 * M + 2 * delta + 1) * f_at(delta + 1);
}

double derived_constants::eps_prime(double eps) const {
    return std::exp(2.0 * eps * static_cast<double>(kappa7()));
}

double derived_constants::max_admissible_eps() const {
    std::int64_t k = kappa7();
    if (k == 0) return std::numeric_limits<double>::infinity();
    return std::log(std::sqrt(2.0)) / (2.0 * static_cast<double>(k));
}

double derived_constants::auto_eps() const {
    std::int64_t k = kappa7();
    if (k == 0) return 1.0;
    return std::min(1.0, std::log(1.4) / (2.0 * static_cast<double>(k)));
}

json derived_constants::to_json() const {
    json j;
    j["delta"] = delta;
    j["f_out"] = prof_out.samples;
    j["f_in"] = prof_in.samples;
    j["f_delta_plus_1"] = f_at(delta + 1);
    j["kappa7"] = kappa7();
    j["auto_eps"] = auto_eps();
    return j;
}

derived_constants compute_constants(const digraph& g, const dist_matrix& m, std::int64_t extra) {
    derived_constants c;
    c.delta = delta_of_exact(g, m).delta;
    std::int64_t rmax = c.delta + std::max<std::int64_t>(1, extra);
    c.prof_out = b_profile(g, m, side::out, rmax);
    c.prof_in = b_profile(g, m, side::in, rmax);
    return c;
}

audit_report audit_triangle_length_bounds(const digraph& g, const dist_matrix& m, std::int64_t delta,
                          const b_function_profile& f, const b_function_profile& gprof,
                          const rational& epsilon) {
    if (epsilon <= rational(0)) throw precondition_error("epsilon must be positive");
    rational de = rational(delta) + epsilon;
    std::int64_t f_de = f.at_ceil(de);
    std::int64_t g_de = gprof.at_ceil(de);
    std::int64_t f_d = f.at(delta);
    std::int64_t g_d = gprof.at(delta);

    audit_report rep;
    rep.lemma = "triangle-length-bounds";
    rational worst_gap(-1);

    std::int64_t n = static_cast<std::int64_t>(g.vertex_count());
    auto len = [&](std::pair<vertex_id, vertex_id> s) { return m.at(s.first, s.second).value(); };
    for (vertex_id a = 0; a < n; ++a) {
        for (vertex_id b = a; b < n; ++b) {
            for (vertex_id c = b; c < n; ++c) {
                auto d1 = side_dirs(m, a, b);
                auto d2 = side_dirs(m, b, c);
                auto d3 = side_dirs(m, a, c);
                if (d1.empty() || d2.empty() || d3.empty()) continue;
                std::array<std::pair<vertex_id, vertex_id>, 3> sides;
                for (const auto& s1 : d1) {
                    sides[0] = s1;
                    for (const auto& s2 : d2) {
                        sides[1] = s2;
                        for (const auto& s3 : d3) {
                            sides[2] = s3;
                            for (const auto& perm : perms) {
                                const auto& P = sides[static_cast<std::size_t>(perm[0])];
                                const auto& Q = sides[static_cast<std::size_t>(perm[1])];
                                const auto& R = sides[static_cast<std::size_t>(perm[2])];
                                if (!(P.first == Q.first || P.first == Q.second)) continue;
                                if (!(P.second == R.first || P.second == R.second)) continue;
                                ++rep.checked;
                                rational lhs(len(P));
                                rational rhs = rational(len(Q)) / epsilon * rational(f_de) +
                                               rational(len(R)) / epsilon * rational(g_de);
                                if (lhs - rhs > worst_gap) {
                                    worst_gap = lhs - rhs;
                                    rep.extremal = {{"part", "i"},
                                                    {"P", {g.name_of(P.first), g.name_of(P.second)}},
                                                    {"Q", {g.name_of(Q.first), g.name_of(Q.second)}},
                                                    {"R", {g.name_of(R.first), g.name_of(R.second)}},
                                                    {"lhs", rational_str(lhs)},
                                                    {"rhs", rational_str(rhs)}};
                                }
                                if (lhs > rhs)
                                    rep.add_violation({{"part", "i"},
                                                       {"P", {g.name_of(P.first), g.name_of(P.second)}},
                                                       {"Q", {g.name_of(Q.first), g.name_of(Q.second)}},
                                                       {"R", {g.name_of(R.first), g.name_of(R.second)}},
                                                       {"lenP", len(P)},
                                                       {"rhs", rational_str(rhs)}});
                            }
                        }
                    }
                }
            }
        }
    }

    for (vertex_id x = 0; x < n; ++x) {
        for (vertex_id y = 0; y < n; ++y) {
            if (x == y) continue;
            ext_dist dxy = m.at(x, y), dyx = m.at(y, x);
            if (dxy.is_infinite() || dyx.is_infinite()) continue;
            ++rep.checked;
            rational lhs(dxy.value());
            rational rhs1 = rational(dyx.value()) / epsilon * rational(f_de) + rational(g_d);
            rational rhs2 = rational(dyx.value()) / epsilon * rational(g_de) + rational(f_d);
            if (lhs > rhs1 || lhs > rhs2)
                rep.add_violation({{"part", "ii"},
                                   {"x", g.name_of(x)},
                                   {"y", g.name_of(y)},
                                   {"d_xy", dxy.value()},
                                   {"d_yx", dyx.value()},
                                   {"rhs1", rational_str(rhs1)},
                                   {"rhs2", rational_str(rhs2)}});
        }
    }
    return rep;
}

audit_report audit_fellow_travel(const digraph& g, const dist_matrix& m, const derived_constants& c) {
    audit_report rep;
    rep.lemma = "transitive-fellow-travel";
    std::int64_t rho = c.kappa7();
    geodesic_extremes ex(g, m);
    std::int64_t n = static_cast<std::int64_t>(g.vertex_count());
    std::int64_t extremal = -1;

    for (vertex_id a = 0; a < n; ++a) {
        for (vertex_id b = 0; b < n; ++b) {
            if (m.at(a, b).is_infinite()) continue;
            for (vertex_id cc = 0; cc < n; ++cc) {
                if (m.at(b, cc).is_infinite()) continue;
                // composition P(a->b) Q(b->c) is an a-c walk, so d(a,c) is finite
                ++rep.checked;
                for (vertex_id v : ex.on_geodesic(a, cc)) {
                    std::int64_t outd = std::min(ex.phi_to(a, b, v), ex.phi_to(b, cc, v));
                    std::int64_t ind = std::min(ex.phi_from(a, b, v), ex.phi_from(b, cc, v));
                    std::int64_t need = std::max(outd, ind);
                    if (need > extremal) {
                        extremal = need;
                        rep.extremal = {{"a", g.name_of(a)}, {"b", g.name_of(b)},
                                        {"c", g.name_of(cc)}, {"v", g.name_of(v)},
                                        {"radius_needed", need}, {"radius_allowed", rho}};
                    }
                    if (outd > rho || ind > rho)
                        rep.add_violation({{"a", g.name_of(a)},
                                           {"b", g.name_of(b)},
                                           {"c", g.name_of(cc)},
                                           {"v", g.name_of(v)},
                                           {"out_radius", outd},
                                           {"in_radius", ind},
                                           {"allowed", rho}});
                }
            }
        }
    }
    return rep;
}

} // namespace dhg
