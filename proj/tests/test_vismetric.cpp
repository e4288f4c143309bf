#include <doctest.h>

#include <cmath>

#include "dhg/errors.hpp"
#include "dhg/vismetric.hpp"
#include "oracle.hpp"

using namespace dhg;

namespace {

ray_spec named_ray(family_ptr f, const std::string& name) {
    return ray_spec_from_decl(f, f->ray_by_name(name));
}

struct ex92_setup {
    truncation t;
    dist_matrix m;
    derived_constants c;
    base_point_set S;
    working_set ws;
    double eps;

    explicit ex92_setup(int radius, std::vector<std::string> extra_vertices = {"x2", "y3", "z4"})
        : t(expand(get_family("ex-dist0"), radius)), m(t.graph), c(compute_constants(t.graph, m, 1)),
          S(make_base(t, t.base_ids())) {
        family_ptr f = get_family("ex-dist0");
        ws.points.push_back(working_point::boundary(named_ray(f, "x-ray")));
        ws.points.push_back(working_point::boundary(named_ray(f, "y-antiray")));
        ws.points.push_back(working_point::boundary(named_ray(f, "z-antiray")));
        for (const auto& nm : extra_vertices)
            ws.points.push_back(working_point::vertex(t, t.graph.id_of(nm)));
        eps = c.auto_eps();
    }
};

} // namespace

TEST_CASE("base point set validation") {
    truncation t = expand(get_family("ex-topbound"), 8);
    CHECK_NOTHROW(make_base(t, t.base_ids()));
    // v0 alone misses the u-sources
    CHECK_THROWS_AS(make_base(t, {t.graph.id_of("v0")}), error);
    CHECK_THROWS_AS(make_base(t, {}), error);

    // tree3 has no radius-uniform base; the registry supplies the leftmost
    // ray vertex for the truncation, r0 alone fails
    truncation tt = expand(get_family("oriented-tree3"), 4);
    CHECK_NOTHROW(make_base(tt, tt.base_ids()));
    CHECK_THROWS_AS(make_base(tt, {tt.graph.id_of("r0")}), error);
}

TEST_CASE("rho_s vertex cases") {
    ex92_setup s(16);
    vertex_id x0 = s.t.graph.id_of("x0");
    working_point a = working_point::vertex(s.t, s.t.graph.id_of("x3"));
    working_point b = working_point::vertex(s.t, s.t.graph.id_of("y2"));

    // s on the start of every geodesic: rho = 0
    rho_estimate self = rho_s(s.t, s.m, s.t.graph.id_of("x3"), a, b, s.ws);
    CHECK(self.exact);
    CHECK_FALSE(self.disconnected);
    CHECK(self.value == 0);

    // from the designated base x0
    rho_estimate est = rho_s(s.t, s.m, x0, a, b, s.ws);
    CHECK(est.exact);
    CHECK(est.value == 3); // the geodesic x3 y3 y2 stays at d_sym >= 3, attained at x3/y2
    CHECK(est.stabilized);

    // disconnected vertices
    working_point ya = working_point::vertex(s.t, s.t.graph.id_of("y2"));
    working_point za = working_point::vertex(s.t, s.t.graph.id_of("z2"));
    rho_estimate dis = rho_s(s.t, s.m, x0, ya, za, s.ws);
    CHECK(dis.disconnected);
    CHECK(rho_eps_of(dis, s.eps) == 1.0);
}

TEST_CASE("rho_eps maps") {
    CHECK(rho_eps_value(ext_dist::infinity(), 0.5) == 0.0);
    CHECK(rho_eps_value(ext_dist::finite(0), 0.5) == 1.0);
    CHECK(rho_eps_value(ext_dist::finite(3), 0.5) == doctest::Approx(0.2231301601).epsilon(1e-6));
    rho_estimate e;
    e.value = 3;
    CHECK(rho_eps_of(e, 0.5) == doctest::Approx(std::exp(-1.5)));
}

TEST_CASE("windowed rho grows with the window on escaping pairs") {
    family_ptr f = get_family("ex-topbound");
    truncation t = expand(f, 20);
    dist_matrix m(t.graph);
    working_set ws;
    ws.points.push_back(working_point::boundary(named_ray(f, "v-ray")));
    ws.points.push_back(working_point::boundary(named_ray(f, "x-antiray")));
    vertex_id v0 = t.graph.id_of("v0");
    rho_estimate est = rho_s(t, m, v0, ws.points[0], ws.points[1], ws);
    CHECK_FALSE(est.disconnected);
    CHECK_FALSE(est.stabilized); // keeps growing: evidence that rho -> inf
    CHECK(est.windows[0] < est.windows[2]);
}

TEST_CASE("vis matrix on ex-dist0 and its audits") {
    ex92_setup s(20);
    vis_matrix vm = compute_vis_matrix(s.t, s.m, s.S, s.ws, s.eps, s.c);

    // labels 0..2 are the classes (x-ray, y-antiray, z-antiray order by key)
    REQUIRE(vm.labels.size() == 6);
    int omega = -1, eta = -1, mu = -1;
    for (int i = 0; i < 3; ++i) {
        if (vm.labels[static_cast<std::size_t>(i)] == "class(x-ray)") omega = i;
        if (vm.labels[static_cast<std::size_t>(i)] == "class(y-antiray)") eta = i;
        if (vm.labels[static_cast<std::size_t>(i)] == "class(z-antiray)") mu = i;
    }
    REQUIRE(omega >= 0);
    REQUIRE(eta >= 0);
    REQUIRE(mu >= 0);

    auto at = [&](int i, int j) { return vm.rho_eps[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
    auto dd = [&](int i, int j) { return vm.d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };

    // the two anti-ray classes are maximally separated in both directions
    CHECK(at(eta, mu) == 1.0);
    CHECK(at(mu, eta) == 1.0);
    CHECK(dd(eta, mu) == 1.0);
    CHECK(dd(mu, eta) == 1.0);
    // omega reaches both with small windowed values
    CHECK(at(omega, eta) < 1.0);
    CHECK(at(omega, mu) < 1.0);
    CHECK(dd(omega, eta) == doctest::Approx(at(omega, eta)));
    // diagonal of the chain matrix is zero
    for (std::size_t i = 0; i < vm.labels.size(); ++i) CHECK(vm.d[i][i] == 0.0);

    // pseudo-semimetric axioms entrywise
    for (std::size_t i = 0; i < vm.labels.size(); ++i)
        for (std::size_t j = 0; j < vm.labels.size(); ++j)
            for (std::size_t k = 0; k < vm.labels.size(); ++k)
                CHECK(vm.d[i][j] <= vm.d[i][k] + vm.d[k][j] + 1e-12);

    audit_report qa = audit_quasi_ultrametric(vm, s.c);
    INFO(qa.to_json().dump());
    CHECK(qa.passed());
    CHECK(qa.checked > 0);

    audit_report sa = audit_visual_sandwich(vm, s.c);
    INFO(sa.to_json().dump());
    CHECK(sa.passed());
}

TEST_CASE("rho_S_eps over base members") {
    ex92_setup s(16);
    // |S| = 1: equals the single-member value
    working_point a = working_point::vertex(s.t, s.t.graph.id_of("x3"));
    working_point b = working_point::vertex(s.t, s.t.graph.id_of("y2"));
    double single = rho_eps_of(rho_s(s.t, s.m, s.S.members[0], a, b, s.ws), s.eps);
    CHECK(rho_S_eps(s.t, s.m, s.S, a, b, s.ws, s.eps, s.c) == doctest::Approx(single));

    // a member sitting on the geodesic start dominates with value 1
    base_point_set S2 = s.S;
    S2.members.push_back(s.t.graph.id_of("x3"));
    CHECK(rho_S_eps(s.t, s.m, S2, a, b, s.ws, s.eps, s.c) == doctest::Approx(1.0));

    CHECK_THROWS_AS(rho_S_eps(s.t, s.m, s.S, a, b, s.ws, 100.0, s.c), error);
}

TEST_CASE("independent set size as a lower bound") {
    truncation t = expand(get_family("ex-dist0"), 8);
    CHECK(t.graph.independent_set_lower_bound({t.graph.id_of("y5"), t.graph.id_of("z5")}) == 2);
    CHECK(t.graph.independent_set_lower_bound({t.graph.id_of("x0")}) == 1);
}

TEST_CASE("order reversal: argmin of rho is argmax of rho_eps") {
    truncation t = expand(get_family("ex-topbound"), 14);
    dist_matrix m(t.graph);
    derived_constants c = compute_constants(t.graph, m, 1);
    base_point_set S = make_base(t, t.base_ids());
    REQUIRE(S.members.size() == 2);
    working_set ws;
    ws.points.push_back(working_point::vertex(t, t.graph.id_of("u1")));
    ws.points.push_back(working_point::vertex(t, t.graph.id_of("y2")));
    ws.points.push_back(working_point::vertex(t, t.graph.id_of("x4")));
    vis_matrix vm = compute_vis_matrix(t, m, S, ws, c.auto_eps(), c);
    for (std::size_t i = 0; i < ws.points.size(); ++i)
        for (std::size_t j = 0; j < ws.points.size(); ++j) {
            // distinct per-member values only
            rho_estimate r0 = rho_s(t, m, S.members[0], ws.points[i], ws.points[j], ws);
            rho_estimate r1 = rho_s(t, m, S.members[1], ws.points[i], ws.points[j], ws);
            if (r0.disconnected || r1.disconnected || r0.value == r1.value) continue;
            CHECK(vm.argmin_rho[i][j] == vm.argmax_eps[i][j]);
        }
}

TEST_CASE("windowed rho matches explicit geodesic enumeration") {
    // oracle: enumerate every geodesic between window endpoints with the
    // brute-force DFS and take min over walks of min over vertices of d_sym
    ex92_setup s(14);
    family_ptr f = get_family("ex-dist0");
    auto d = oracle::floyd(s.t.graph);
    std::int64_t H = s.ws.effective_horizon(s.t);
    std::int64_t n0 = s.ws.operative_n0(s.t);
    vertex_id base = s.t.graph.id_of("x0");

    auto dsym = [&](vertex_id v) {
        return std::min(d[static_cast<std::size_t>(base)][static_cast<std::size_t>(v)],
                        d[static_cast<std::size_t>(v)][static_cast<std::size_t>(base)]);
    };
    // omega -> eta and omega -> vertex cases
    std::vector<vertex_id> xs = materialize_max(named_ray(f, "x-ray"), s.t, H);
    std::vector<vertex_id> ys = materialize_max(named_ray(f, "y-antiray"), s.t, H);
    std::int64_t brute = oracle::INF;
    for (std::int64_t i = n0; i < static_cast<std::int64_t>(xs.size()); ++i)
        for (std::int64_t j = n0; j < static_cast<std::int64_t>(ys.size()); ++j) {
            if (d[static_cast<std::size_t>(xs[i])][static_cast<std::size_t>(ys[j])] >= oracle::INF) continue;
            for (const auto& w : oracle::shortest_walks(s.t.graph, xs[i], ys[j], d))
                for (vertex_id v : w) brute = std::min(brute, dsym(v));
        }
    rho_estimate est = rho_s(s.t, s.m, base, s.ws.points[0], s.ws.points[1], s.ws);
    REQUIRE_FALSE(est.disconnected);
    CHECK(est.value == brute);

    working_point y3 = working_point::vertex(s.t, s.t.graph.id_of("y3"));
    std::int64_t brute2 = oracle::INF;
    for (std::int64_t i = n0; i < static_cast<std::int64_t>(xs.size()); ++i) {
        vertex_id tgt = s.t.graph.id_of("y3");
        if (d[static_cast<std::size_t>(xs[i])][static_cast<std::size_t>(tgt)] >= oracle::INF) continue;
        for (const auto& w : oracle::shortest_walks(s.t.graph, xs[i], tgt, d))
            for (vertex_id v : w) brute2 = std::min(brute2, dsym(v));
    }
    rho_estimate est2 = rho_s(s.t, s.m, base, s.ws.points[0], y3, s.ws);
    REQUIRE_FALSE(est2.disconnected);
    CHECK(est2.value == brute2);
}

TEST_CASE("quasi-ultrametric holds on seeded random vertex triples") {
    std::mt19937_64 rng(777);
    for (const char* name : {"ex-topbound", "ex-dist0", "int", "monoid-ab"}) {
        family_ptr f = get_family(name);
        truncation t = expand(f, 10);
        dist_matrix m(t.graph);
        derived_constants c = compute_constants(t.graph, m, 1);
        base_point_set S = make_base(t, t.base_ids());
        working_set ws;
        std::size_t n = t.graph.vertex_count();
        for (int k = 0; k < 6; ++k)
            ws.points.push_back(working_point::vertex(t, static_cast<vertex_id>(rng() % n)));
        vis_matrix vm = compute_vis_matrix(t, m, S, ws, c.auto_eps(), c);
        audit_report rep = audit_quasi_ultrametric(vm, c);
        INFO(name, ": ", rep.to_json().dump());
        CHECK(rep.passed());
        CHECK(audit_visual_sandwich(vm, c).passed());
    }
}

TEST_CASE("d_chain never increases when the working set grows") {
    ex92_setup small(16, {"x2"});
    ex92_setup big(16, {"x2", "x5", "y3"});
    vis_matrix a = compute_vis_matrix(small.t, small.m, small.S, small.ws, small.eps, small.c);
    vis_matrix b = compute_vis_matrix(big.t, big.m, big.S, big.ws, big.eps, big.c);
    // the first four labels coincide
    for (std::size_t i = 0; i < a.labels.size(); ++i)
        for (std::size_t j = 0; j < a.labels.size(); ++j)
            CHECK(b.d[i][j] <= a.d[i][j] + 1e-12);
}

TEST_CASE("two-point working set: d equals the direct weight") {
    ex92_setup s(16, {});
    working_set two;
    two.points = {s.ws.points[0], s.ws.points[1]};
    vis_matrix vm = compute_vis_matrix(s.t, s.m, s.S, two, s.eps, s.c);
    CHECK(vm.d[0][1] == doctest::Approx(vm.rho_eps[0][1]));
    CHECK(vm.d[1][0] == doctest::Approx(vm.rho_eps[1][0]));
}

TEST_CASE("eps gate") {
    ex92_setup s(16);
    CHECK_THROWS_AS(compute_vis_matrix(s.t, s.m, s.S, s.ws, 10.0, s.c), error);
    try {
        compute_vis_matrix(s.t, s.m, s.S, s.ws, 10.0, s.c);
    } catch (const error& e) {
        CHECK(e.kind() == errkind::parameter);
        CHECK(std::string(e.what()).find("maximal admissible") != std::string::npos);
    }
}

TEST_CASE("ex-topbound chain distances: one direction collapses, the other stays") {
    family_ptr f = get_family("ex-topbound");
    std::vector<double> forward;
    double backward_floor = 1.0;
    for (int radius : {12, 16, 20}) {
        truncation t = expand(f, radius);
        dist_matrix m(t.graph);
        derived_constants c = compute_constants(t.graph, m, 1);
        base_point_set S = make_base(t, t.base_ids());
        working_set ws;
        ws.points.push_back(working_point::boundary(named_ray(f, "v-ray")));
        ws.points.push_back(working_point::boundary(named_ray(f, "x-antiray")));
        ws.points.push_back(working_point::vertex(t, t.graph.id_of("x3")));
        double eps = c.auto_eps();
        vis_matrix vm = compute_vis_matrix(t, m, S, ws, eps, c);
        int eta = vm.labels[0] == "class(v-ray)" ? 0 : 1;
        int mu = 1 - eta;
        forward.push_back(vm.d[static_cast<std::size_t>(eta)][static_cast<std::size_t>(mu)]);
        backward_floor = std::min(backward_floor,
                                  vm.d[static_cast<std::size_t>(mu)][static_cast<std::size_t>(eta)]);
        // direct rho_eps floor for the backward direction
        CHECK(vm.d[static_cast<std::size_t>(mu)][static_cast<std::size_t>(eta)] >=
              0.5 * vm.rho_eps[static_cast<std::size_t>(mu)][static_cast<std::size_t>(eta)]);
    }
    CHECK(forward[0] > forward[1]);
    CHECK(forward[1] > forward[2]);
    CHECK(backward_floor >= 0.5);
}

TEST_CASE("neighborhoods on ex-topbound") {
    family_ptr f = get_family("ex-topbound");
    truncation t = expand(f, 16);
    dist_matrix m(t.graph);
    auto rays = builtin_rays(f);
    boundary_class eta;
    eta.representatives = {named_ray(f, "v-ray")};
    eta.has_ray = true;
    boundary_class mu;
    mu.representatives = {named_ray(f, "x-antiray")};
    mu.has_anti_ray = true;

    vertex_id v0 = t.graph.id_of("v0");
    for (std::int64_t r : {2, 3, 4}) {
        neighborhood_result cminus = neighborhood(t, m, eta, v0, r, nbhd_side::minus, 12);
        neighborhood_result cplus = neighborhood(t, m, mu, v0, r, nbhd_side::plus, 12);
        // no w vertex in either
        for (int i = 0; i <= 15; ++i) {
            std::string wn = "w" + std::to_string(i);
            if (!t.graph.has_vertex(wn)) continue;
            vertex_id w = t.graph.id_of(wn);
            CHECK_FALSE(cminus.contains(w));
            CHECK_FALSE(cplus.contains(w));
        }
        // mid-range u and v vertices in C-, x and y in C+
        CHECK(cminus.contains(t.graph.id_of("u7")));
        CHECK(cminus.contains(t.graph.id_of("v7")));
        CHECK_FALSE(cminus.contains(t.graph.id_of("x7")));
        CHECK(cplus.contains(t.graph.id_of("x7")));
        CHECK(cplus.contains(t.graph.id_of("y7")));
        CHECK_FALSE(cplus.contains(t.graph.id_of("u7")));
        CHECK_FALSE(cplus.contains(t.graph.id_of("v7")));
    }

    // wrong representative kind
    CHECK_THROWS_AS(neighborhood(t, m, eta, v0, 2, nbhd_side::plus, 12), error);

    // r = 0 avoids only x itself
    neighborhood_result r0 = neighborhood(t, m, eta, t.graph.id_of("y3"), 0, nbhd_side::minus, 12);
    CHECK(r0.contains(t.graph.id_of("v2")));
    CHECK(r0.contains(t.graph.id_of("u2")));
    CHECK_FALSE(r0.contains(t.graph.id_of("y3"))); // the avoided center
}

TEST_CASE("two-sided chain collapse only happens for merged classes") {
    // Instance check: whenever both directions of d fall below the
    // zero-evidence threshold for class points, the classifier must merge
    // the representatives.
    const double thr = 1e-9;
    for (const char* name : {"ex-topbound", "ex-dist0", "monoid-ab"}) {
        family_ptr f = get_family(name);
        truncation t = expand(f, 16);
        dist_matrix m(t.graph);
        derived_constants c = compute_constants(t.graph, m, 1);
        base_point_set S = make_base(t, t.base_ids());
        working_set ws;
        for (const auto& d : f->rays) ws.points.push_back(working_point::boundary(ray_spec_from_decl(f, d)));
        vis_matrix vm = compute_vis_matrix(t, m, S, ws, c.auto_eps(), c);
        classification cl = classify(t, builtin_rays(f), t.origin_ids(), {4, 4, -1});
        auto class_of = [&](const std::string& label) {
            for (std::size_t ci = 0; ci < cl.classes.size(); ++ci)
                for (const auto& rep : cl.classes[ci].representatives)
                    if ("class(" + rep.name + ")" == label) return static_cast<int>(ci);
            return -1;
        };
        for (std::size_t i = 0; i < ws.points.size(); ++i)
            for (std::size_t j = 0; j < ws.points.size(); ++j) {
                if (i == j) continue;
                if (vm.d[i][j] < thr && vm.d[j][i] < thr)
                    CHECK(class_of(vm.labels[i]) == class_of(vm.labels[j]));
            }
    }
}

TEST_CASE("neighborhood constant drop keeps equivalent tails") {
    // An equivalent representative's tail that the r-level set contains must
    // stay inside the level set with r lowered by kappa7 (clamped at 0).
    family_ptr f = get_family("ex-topbound");
    truncation t = expand(f, 16);
    dist_matrix m(t.graph);
    derived_constants c = compute_constants(t.graph, m, 1);
    boundary_class eta;
    eta.representatives = {named_ray(f, "v-ray")};
    eta.has_ray = true;
    vertex_id x = t.graph.id_of("v0");
    std::int64_t r = 3;
    std::int64_t r_low = std::max<std::int64_t>(0, r - c.kappa7());
    neighborhood_result level = neighborhood(t, m, eta, x, r, nbhd_side::minus, 12);
    neighborhood_result low = neighborhood(t, m, eta, x, r_low, nbhd_side::minus, 12);
    // the equivalent u-prefixed representative, kept below the horizon so
    // its vertices can still reach the designated tail
    ray_spec upref{f, "u-ray", ray_kind::ray, {"u6", "v6"}, "v"};
    auto ids = materialize_max(upref, t, 5);
    bool tail_in_level = true;
    for (std::size_t i = 1; i < ids.size(); ++i) tail_in_level = tail_in_level && level.contains(ids[i]);
    if (tail_in_level)
        for (std::size_t i = 1; i < ids.size(); ++i) CHECK(low.contains(ids[i]));
    CHECK(tail_in_level); // meaningful on this family
}

TEST_CASE("neighborhood level sets shrink as r grows") {
    family_ptr f = get_family("ex-topbound");
    truncation t = expand(f, 16);
    dist_matrix m(t.graph);
    boundary_class eta;
    eta.representatives = {named_ray(f, "v-ray")};
    eta.has_ray = true;
    vertex_id v0 = t.graph.id_of("v0");
    neighborhood_result a = neighborhood(t, m, eta, v0, 2, nbhd_side::minus, 12);
    neighborhood_result b = neighborhood(t, m, eta, v0, 4, nbhd_side::minus, 12);
    for (vertex_id v : b.members) CHECK(a.contains(v));
}
