// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// fails. Criteria pin every tolerance in code; timings are wall-clock.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <random>
#include <set>
#include <sys/wait.h>

#include "dhg/boundary.hpp"
#include "dhg/ends.hpp"
#include "dhg/family.hpp"
#include "dhg/hyperbolicity.hpp"
#include "dhg/rays.hpp"
#include "dhg/report.hpp"
#include "dhg/vismetric.hpp"
#include "oracle.hpp"

using namespace dhg;

namespace {

struct outcome {
    bool pass;
    std::string detail;
};

ray_spec named_ray(family_ptr f, const std::string& name) {
    return ray_spec_from_decl(f, f->ray_by_name(name));
}

std::string run_cmd(const std::string& cmd, int* rc) {
    std::array<char, 4096> buf{};
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return "";
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), p)) out += buf.data();
    int status = pclose(p);
    *rc = WEXITSTATUS(status);
    return out;
}

// --- criterion 1: ex-topbound boundary structure ---------------------------

outcome criterion1() {
    family_ptr f = get_family("ex-topbound");
    truncation t = expand(f, 24);
    dist_matrix m(t.graph);
    std::vector<ray_spec> rays = builtin_rays(f);
    for (std::int64_t r : {4, 6, 8}) {
        classification c = classify(t, rays, t.origin_ids(), {4, r, -1});
        if (c.classes.size() != 2) return {false, "r=" + std::to_string(r) + ": expected 2 classes"};
        std::size_t iv = c.classes[0].has_ray ? 0 : 1;
        if (!c.leq[iv][1 - iv] || c.leq[1 - iv][iv])
            return {false, "r=" + std::to_string(r) + ": order is not eta < mu"};
        if (c.inconclusive()) return {false, "r=" + std::to_string(r) + ": inconclusive"};
    }
    boundary_class eta;
    eta.representatives = {named_ray(f, "v-ray")};
    eta.has_ray = true;
    boundary_class mu;
    mu.representatives = {named_ray(f, "x-antiray")};
    mu.has_anti_ray = true;
    vertex_id x = t.graph.id_of("v0");
    for (std::int64_t r = 2; r <= 8; ++r) {
        neighborhood_result cm = neighborhood(t, m, eta, x, r, nbhd_side::minus, 18);
        neighborhood_result cp = neighborhood(t, m, mu, x, r, nbhd_side::plus, 18);
        for (std::size_t v = 0; v < t.graph.vertex_count(); ++v) {
            if (t.graph.name_of(static_cast<vertex_id>(v))[0] != 'w') continue;
            if (cm.contains(static_cast<vertex_id>(v)) || cp.contains(static_cast<vertex_id>(v)))
                return {false, "w vertex inside a typical neighborhood at r=" + std::to_string(r)};
        }
        // positive content evidence
        if (!cm.contains(t.graph.id_of("u10")) || !cm.contains(t.graph.id_of("v10")))
            return {false, "C- misses u/v tail at r=" + std::to_string(r)};
        if (!cp.contains(t.graph.id_of("x10")) || !cp.contains(t.graph.id_of("y10")))
            return {false, "C+ misses x/y tail at r=" + std::to_string(r)};
    }
    return {true, "2 classes, eta < mu at r in {4,6,8}; w vertices excluded for r in [2,8]"};
}

// --- criterion 2: ex-dist0 zero-distance pattern ---------------------------

outcome criterion2() {
    family_ptr f = get_family("ex-dist0");
    std::vector<double> fe, fm;
    for (int radius : {12, 16, 20}) {
        truncation t = expand(f, radius);
        dist_matrix m(t.graph);
        derived_constants c = compute_constants(t.graph, m, 1);
        base_point_set S = make_base(t, t.base_ids());
        working_set ws;
        for (const auto& d : f->rays) ws.points.push_back(working_point::boundary(ray_spec_from_decl(f, d)));
        vis_matrix vm = compute_vis_matrix(t, m, S, ws, c.auto_eps(), c);
        int om = -1, eta = -1, mu = -1;
        for (int i = 0; i < 3; ++i) {
            if (vm.labels[static_cast<std::size_t>(i)] == "class(x-ray)") om = i;
            if (vm.labels[static_cast<std::size_t>(i)] == "class(y-antiray)") eta = i;
            if (vm.labels[static_cast<std::size_t>(i)] == "class(z-antiray)") mu = i;
        }
        auto D = [&](int i, int j) { return vm.d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
        auto R = [&](int i, int j) { return vm.rho_eps[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
        fe.push_back(D(om, eta));
        fm.push_back(D(om, mu));
        if (D(eta, mu) < 0.5 * R(eta, mu) || D(mu, eta) < 0.5 * R(mu, eta))
            return {false, "anti-ray pair dropped below half its direct weight at N=" + std::to_string(radius)};
    }
    if (!(fe[0] > fe[1] && fe[1] > fe[2])) return {false, "d(omega,eta) not strictly decreasing"};
    if (!(fm[0] > fm[1] && fm[1] > fm[2])) return {false, "d(omega,mu) not strictly decreasing"};

    truncation t = expand(f, 20);
    classification c = classify(t, builtin_rays(f), t.origin_ids(), {4, 6, -1});
    if (c.classes.size() != 3) return {false, "expected 3 classes"};
    int om = -1, eta = -1, mu = -1;
    for (int i = 0; i < 3; ++i) {
        if (c.classes[static_cast<std::size_t>(i)].has_ray)
            om = i;
        else if (eta < 0)
            eta = i;
        else
            mu = i;
    }
    auto L = [&](int i, int j) { return c.leq[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
    if (!(L(om, eta) && L(om, mu) && !L(eta, om) && !L(mu, om) && !L(eta, mu) && !L(mu, eta)))
        return {false, "order structure wrong"};
    return {true, "3 classes with omega below both; chain distances trend as required"};
}

// --- criterion 3: semigroup counts via recipes -----------------------------

outcome criterion3(const std::string& bin) {
    for (const std::string name : {"nat-one-point", "int-two-points", "monoid-ab-one-point"}) {
        auto start = std::chrono::steady_clock::now();
        int rc = 0;
        std::string out = run_cmd(bin + " recipe --name " + name, &rc);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (rc != 0) return {false, name + " exited " + std::to_string(rc)};
        if (secs >= 10.0) return {false, name + " took " + std::to_string(secs) + "s"};
        json j = json::parse(out);
        if (j["passed"] != true) return {false, name + " expectations failed"};
    }
    return {true, "nat=1 class, int=2 classes, monoid-ab=1 class with d(a,b)=d(b,a)=inf"};
}

// --- criterion 4: delta oracle equivalence ---------------------------------

outcome criterion4() {
    std::mt19937_64 rng(20250810);
    std::set<std::string> seen;
    std::int64_t graphs = 0;
    for (int attempts = 0; attempts < 40000 && graphs < 500; ++attempts) {
        int n = 1 + static_cast<int>(rng() % 5);
        int mcount = static_cast<int>(rng() % 9);
        std::vector<std::pair<int, int>> edges;
        for (int e = 0; e < mcount; ++e)
            edges.emplace_back(static_cast<int>(rng() % static_cast<std::uint64_t>(n)),
                               static_cast<int>(rng() % static_cast<std::uint64_t>(n)));
        // canonical form under vertex permutations (isomorphism sampling)
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        std::string best;
        do {
            std::vector<std::pair<int, int>> relab;
            for (auto [s, d] : edges)
                relab.emplace_back(perm[static_cast<std::size_t>(s)], perm[static_cast<std::size_t>(d)]);
            std::sort(relab.begin(), relab.end());
            std::string key = std::to_string(n) + ":";
            for (auto [s, d] : relab) key += std::to_string(s) + ">" + std::to_string(d) + ";";
            if (best.empty() || key < best) best = key;
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (!seen.insert(best).second) continue;
        ++graphs;

        digraph g;
        for (int i = 0; i < n; ++i) g.add_vertex("n" + std::to_string(i));
        for (auto [s, d] : edges) g.add_edge(static_cast<vertex_id>(s), static_cast<vertex_id>(d));
        std::int64_t got = delta_of_exact(g).delta;
        std::int64_t want = oracle::delta_brute(g);
        if (got != want)
            return {false, "mismatch on graph " + best + ": got " + std::to_string(got) + ", oracle " +
                               std::to_string(want)};
    }
    if (graphs < 500) return {false, "only generated " + std::to_string(graphs) + " distinct graphs"};
    return {true, std::to_string(graphs) + " distinct digraphs (<=5 vertices, <=8 edges), zero mismatches"};
}

// --- criterion 5: lemma audits on every registered family ------------------

outcome criterion5() {
    struct family_cfg {
        const char* name;
        int radius;
        std::vector<std::string> vertices;
    };
    const std::vector<family_cfg> cfgs = {
        {"ex-topbound", 8, {"v5", "x3", "y2"}}, {"ex-dist0", 8, {"x2", "y3", "z4"}},
        {"nat", 10, {"0", "3", "6"}},           {"int", 10, {"0", "4", "-4"}},
        {"monoid-ab", 8, {"e", "a^3", "b.a^2"}}, {"oriented-tree3", 6, {"r2", "r-2", "t0"}},
    };
    std::string detail;
    for (const auto& cfg : cfgs) {
        family_ptr f = get_family(cfg.name);
        truncation t = expand(f, cfg.radius);
        dist_matrix m(t.graph);
        derived_constants c = compute_constants(t.graph, m, 1);
        audit_report a33 = audit_triangle_length_bounds(t.graph, m, c.delta, c.prof_out, c.prof_in, rational(1));
        if (!a33.passed())
            return {false, std::string(cfg.name) + ": prop33 violations " + a33.violations.dump()};
        audit_report a34 = audit_fellow_travel(t.graph, m, c);
        if (!a34.passed())
            return {false, std::string(cfg.name) + ": lemma34 violations " + a34.violations.dump()};

        base_point_set S = make_base(t, t.base_ids());
        working_set ws;
        for (const auto& d : f->rays) ws.points.push_back(working_point::boundary(ray_spec_from_decl(f, d)));
        for (const auto& nm : cfg.vertices) ws.points.push_back(working_point::vertex(t, t.graph.id_of(nm)));
        vis_matrix vm = compute_vis_matrix(t, m, S, ws, c.auto_eps(), c);
        audit_report qa = audit_quasi_ultrametric(vm, c);
        if (!qa.passed())
            return {false, std::string(cfg.name) + ": quasi-ultrametric violations " + qa.violations.dump()};
        audit_report sa = audit_visual_sandwich(vm, c);
        if (!sa.passed())
            return {false, std::string(cfg.name) + ": sandwich violations " + sa.violations.dump()};
        detail += std::string(cfg.name) + "(delta=" + std::to_string(c.delta) + ") ";
    }
    return {true, "all four audits clean on " + detail};
}

// --- criterion 6: no 3-chains ----------------------------------------------

outcome criterion6() {
    // registered families
    for (const auto& name : family_names()) {
        family_ptr f = get_family(name);
        int radius = name == "oriented-tree3" ? 10 : 16;
        truncation t = expand(f, radius);
        classification c = classify(t, builtin_rays(f), t.origin_ids(), {4, 4, -1});
        audit_report rep = audit_no_3_chain(c);
        if (!rep.passed()) return {false, name + ": " + rep.violations.dump()};
    }
    // 100 seeded random ray pools over the families
    std::mt19937_64 rng(424242);
    const std::vector<std::string>& fams = family_names();
    int pools = 0;
    while (pools < 100) {
        const std::string& name = fams[rng() % fams.size()];
        family_ptr f = get_family(name);
        int radius = name == "oriented-tree3" ? 10 : 16;
        truncation t = expand(f, radius);
        std::vector<ray_spec> pool;
        std::vector<ray_spec> all = builtin_rays(f);
        std::size_t k = 2 + rng() % 3;
        for (std::size_t i = 0; i < k; ++i) {
            ray_spec r = all[rng() % all.size()];
            std::int64_t shift = static_cast<std::int64_t>(rng() % 4);
            pool.push_back(shift > 0 ? tail_of(r, shift) : r);
        }
        classification c = classify(t, pool, t.origin_ids(), {4, 4, -1});
        audit_report rep = audit_no_3_chain(c);
        if (!rep.passed())
            return {false, name + " pool " + std::to_string(pools) + ": " + rep.violations.dump()};
        ++pools;
    }
    return {true, "registered families plus 100 seeded ray pools, no 3-chains, content restriction holds"};
}

// --- criterion 7: refinement -----------------------------------------------

outcome criterion7() {
    for (const auto& name : family_names()) {
        family_ptr f = get_family(name);
        int radius = name == "oriented-tree3" ? 10 : 16;
        truncation t1 = expand(f, radius);
        truncation t2 = expand(f, radius + 5);
        auto rays = builtin_rays(f);
        classification b1 = classify(t1, rays, t1.origin_ids(), {4, 4, -1});
        classification b2 = classify(t2, rays, t2.origin_ids(), {4, 4, -1});
        classification e1 = classify_ends(t1, rays, t1.origin_ids(), {-1, 4, -1});
        classification e2 = classify_ends(t2, rays, t2.origin_ids(), {-1, 4, -1});
        // stability of the resolution
        if (b1.classes.size() != b2.classes.size() || b1.leq != b2.leq)
            return {false, name + ": boundary classification not stable from N to N+5"};
        if (e1.classes.size() != e2.classes.size() || e1.leq != e2.leq)
            return {false, name + ": end classification not stable from N to N+5"};
        refinement_result rr = refinement_map(b2, e2);
        if (!rr.report.passed()) return {false, name + ": " + rr.report.violations.dump()};
    }
    return {true, "refinement audit clean on every registered family at stabilized resolutions"};
}

// --- criterion 8: determinism ----------------------------------------------

outcome criterion8(const std::string& bin) {
    for (const std::string name :
         {"nat-one-point", "int-two-points", "monoid-ab-one-point", "ex71-boundary", "ex92-zero-distance"}) {
        int rc1 = 0, rc2 = 0;
        std::string a = run_cmd(bin + " recipe --name " + name, &rc1);
        std::string b = run_cmd(bin + " recipe --name " + name, &rc2);
        if (a.empty() || a != b || rc1 != rc2)
            return {false, name + ": reruns differ"};
    }
    return {true, "every recipe rerun is byte-identical"};
}

} // namespace

int main() {
    const std::string bin = DHG_BIN;
    struct crit {
        int id;
        const char* name;
        double budget_s;
        outcome (*fn)();
        outcome (*fn_bin)(const std::string&);
    };
    const std::vector<crit> criteria = {
        {1, "ex-topbound boundary structure (N=24, M=4, r in {4,6,8})", 10.0, criterion1, nullptr},
        {2, "ex-dist0 zero-distance pattern (N in {12,16,20})", 30.0, criterion2, nullptr},
        {3, "semigroup boundary counts via recipes", 30.0, nullptr, criterion3},
        {4, "delta oracle equivalence (>=500 digraphs, <=5 vertices, <=8 edges)", 300.0, criterion4, nullptr},
        {5, "lemma audits on every registered family truncation", 300.0, criterion5, nullptr},
        {6, "no-3-chain order structure (families + 100 seeded pools)", 120.0, criterion6, nullptr},
        {7, "boundary refines ends at stabilized resolutions", 120.0, criterion7, nullptr},
        {8, "byte-identical recipe reruns", 60.0, nullptr, criterion8},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        outcome o = c.fn ? c.fn() : c.fn_bin(bin);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_time = secs < c.budget_s;
        bool pass = o.pass && in_time;
        std::printf("%s: criterion %d (%s) [%.2fs]%s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    o.detail.empty() ? "" : " -- ", o.detail.c_str());
        if (!in_time && o.pass) std::printf("      exceeded time budget of %.0fs\n", c.budget_s);
        if (!pass) ++failures;
    }
    if (failures == 0) {
        std::printf("acceptance: all %zu criteria passed\n", criteria.size());
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", failures);
    return 1;
}
