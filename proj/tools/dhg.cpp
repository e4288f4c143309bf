// dhg: directed-graph hyperbolicity toolkit.
//
// JSON-only machine output on stdout (pretty rendering behind --pretty);
// errors as JSON on stderr. Exit codes: 0 success, 1 audit/expectation
// violations, 2 usage errors, 3 capacity/expansion errors.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dhg/boundary.hpp"
#include "dhg/ends.hpp"
#include "dhg/errors.hpp"
#include "dhg/family.hpp"
#include "dhg/hyperbolicity.hpp"
#include "dhg/rays.hpp"
#include "dhg/report.hpp"
#include "dhg/vismetric.hpp"

using namespace dhg;

namespace {

int exit_code_for(errkind k) {
    switch (k) {
        case errkind::capacity:
        case errkind::expansion:
            return 3;
        default:
            return 2;
    }
}

const char* kind_name(errkind k) {
    switch (k) {
        case errkind::usage: return "usage";
        case errkind::parse: return "parse";
        case errkind::domain: return "domain";
        case errkind::precondition: return "precondition";
        case errkind::parameter: return "parameter";
        case errkind::capacity: return "capacity";
        case errkind::expansion: return "expansion";
    }
    return "error";
}

struct cli_ctx {
    run_manifest manifest;
    bool pretty = false;

    void emit(json report, int& rc_slot, int rc) const {
        report["manifest"] = manifest.to_json();
        std::cout << (pretty ? report.dump(2) : report.dump()) << "\n";
        rc_slot = rc;
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct graph_source {
    std::string family;
    int radius = 12;
    std::string input;

    void add_options(CLI::App* cmd, bool need_family = false) {
        auto* f = cmd->add_option("--family", family, "registered family name");
        cmd->add_option("--radius,--N", radius, "truncation radius");
        if (!need_family) {
            auto* i = cmd->add_option("--input", input, "digraph file (edge list or json)");
            f->excludes(i);
        }
    }

    bool is_family() const { return !family.empty(); }

    truncation load_truncation(cli_ctx& ctx) const {
        if (!is_family()) throw usage_error("this command needs --family");
        truncation t = expand(get_family(family), radius);
        ctx.manifest.inputs["family"] = family;
        ctx.manifest.params["radius"] = radius;
        return t;
    }

    digraph load_graph(cli_ctx& ctx) const {
        if (is_family()) return load_truncation(ctx).graph;
        if (input.empty()) throw usage_error("need --family or --input");
        std::string bytes = slurp(input);
        ctx.manifest.inputs[input] = fnv1a_hex(bytes);
        std::string trimmed = bytes.substr(bytes.find_first_not_of(" \t\r\n") == std::string::npos
                                               ? bytes.size()
                                               : bytes.find_first_not_of(" \t\r\n"));
        if (!trimmed.empty() && trimmed[0] == '{') return digraph_from_json(json::parse(bytes));
        return ingest_edge_list(bytes);
    }
};

std::vector<ray_spec> resolve_rays(family_ptr f, const std::string& spec, cli_ctx& ctx) {
    if (spec == "builtin") {
        ctx.manifest.params["rays"] = "builtin";
        return builtin_rays(f);
    }
    std::string bytes = slurp(spec);
    ctx.manifest.inputs[spec] = fnv1a_hex(bytes);
    std::vector<ray_spec> out;
    for (const auto& j : json::parse(bytes)) out.push_back(ray_spec_from_json(j));
    return out;
}

// builtin ray name, optionally with a "+k" tail suffix
ray_spec resolve_one_ray(family_ptr f, const std::string& name) {
    auto plus = name.rfind('+');
    if (plus != std::string::npos) {
        std::int64_t shift = std::stoll(name.substr(plus + 1));
        return tail_of(ray_spec_from_decl(f, f->ray_by_name(name.substr(0, plus))), shift);
    }
    return ray_spec_from_decl(f, f->ray_by_name(name));
}

json classification_report(const truncation& t, const classification& c) {
    json j = c.to_json(t.graph);
    j["class_count"] = c.classes.size();
    return j;
}

// ---------------------------------------------------------------------------
// recipes: canned pipelines reproducing the worked examples, with their
// expected outcomes machine-checked
// ---------------------------------------------------------------------------

struct expectation {
    std::string check;
    bool pass;
};

json expectations_json(const std::vector<expectation>& es, bool& all) {
    json a = json::array();
    all = true;
    for (const auto& e : es) {
        a.push_back({{"check", e.check}, {"pass", e.pass}});
        all = all && e.pass;
    }
    return a;
}

json recipe_nat_one_point(std::vector<expectation>& es) {
    family_ptr f = get_family("nat");
    truncation t = expand(f, 16);
    std::vector<ray_spec> rays = builtin_rays(f);
    rays.push_back(tail_of(rays[0], 2));
    classification c = classify(t, rays, t.origin_ids(), {2, 4, -1});
    es.push_back({"one boundary class", c.classes.size() == 1});
    es.push_back({"conclusive", !c.inconclusive()});
    json j;
    j["classification"] = classification_report(t, c);
    return j;
}

json recipe_int_two_points(std::vector<expectation>& es) {
    family_ptr f = get_family("int");
    truncation t = expand(f, 16);
    classification c = classify(t, builtin_rays(f), t.origin_ids(), {4, 5, -1});
    es.push_back({"two boundary classes", c.classes.size() == 2});
    es.push_back({"incomparable", c.classes.size() == 2 && !c.leq[0][1] && !c.leq[1][0]});
    es.push_back({"conclusive", !c.inconclusive()});
    json j;
    j["classification"] = classification_report(t, c);
    return j;
}

json recipe_monoid_ab_one_point(std::vector<expectation>& es) {
    family_ptr f = get_family("monoid-ab");
    truncation t = expand(f, 14);
    classification c = classify(t, builtin_rays(f), t.origin_ids(), {2, 4, -1});
    es.push_back({"one boundary class", c.classes.size() == 1});
    vertex_id a = t.graph.id_of("a"), b = t.graph.id_of("b");
    ext_dist ab = t.graph.dist(a, b), ba = t.graph.dist(b, a);
    es.push_back({"dist(a,b) infinite", ab.is_infinite() && t.dist_exact(a, b, ab)});
    es.push_back({"dist(b,a) infinite", ba.is_infinite() && t.dist_exact(b, a, ba)});
    json j;
    j["classification"] = classification_report(t, c);
    j["dist_a_b"] = ext_to_json(ab);
    j["dist_b_a"] = ext_to_json(ba);
    return j;
}

json recipe_ex71_boundary(std::vector<expectation>& es) {
    family_ptr f = get_family("ex-topbound");
    truncation t = expand(f, 24);
    dist_matrix m(t.graph);
    std::vector<ray_spec> rays = builtin_rays(f);
    json per_r = json::array();
    for (std::int64_t r : {4, 6, 8}) {
        classification c = classify(t, rays, t.origin_ids(), {4, r, -1});
        bool two = c.classes.size() == 2;
        bool order_ok = false;
        if (two) {
            std::size_t iv = c.classes[0].has_ray ? 0 : 1;
            order_ok = c.leq[iv][1 - iv] && !c.leq[1 - iv][iv];
        }
        es.push_back({"r=" + std::to_string(r) + ": 2 classes", two});
        es.push_back({"r=" + std::to_string(r) + ": ray class strictly below anti-ray class", order_ok});
        per_r.push_back({{"r", r}, {"classification", classification_report(t, c)}});
    }

    boundary_class eta;
    eta.representatives = {resolve_one_ray(f, "v-ray")};
    eta.has_ray = true;
    boundary_class mu;
    mu.representatives = {resolve_one_ray(f, "x-antiray")};
    mu.has_anti_ray = true;
    vertex_id x = t.graph.id_of("v0");
    bool w_clean = true;
    for (std::int64_t r : {2, 4, 6, 8}) {
        neighborhood_result cm = neighborhood(t, m, eta, x, r, nbhd_side::minus, 18);
        neighborhood_result cp = neighborhood(t, m, mu, x, r, nbhd_side::plus, 18);
        for (std::size_t v = 0; v < t.graph.vertex_count(); ++v) {
            if (t.graph.name_of(static_cast<vertex_id>(v))[0] != 'w') continue;
            if (cm.contains(static_cast<vertex_id>(v)) || cp.contains(static_cast<vertex_id>(v)))
                w_clean = false;
        }
    }
    es.push_back({"w vertices in no typical neighborhood (r >= 2)", w_clean});

    json j;
    j["classifications"] = per_r;
    return j;
}

json recipe_ex92_zero_distance(std::vector<expectation>& es) {
    family_ptr f = get_family("ex-dist0");
    json trend = json::array();
    std::vector<double> fwd_eta, fwd_mu;
    bool floor_ok = true;
    classification final_c;
    truncation final_t = expand(f, 20);

    for (int radius : {12, 16, 20}) {
        truncation t = expand(f, radius);
        dist_matrix m(t.graph);
        derived_constants c = compute_constants(t.graph, m, 1);
        base_point_set S = make_base(t, t.base_ids());
        working_set ws;
        for (const auto& d : f->rays) ws.points.push_back(working_point::boundary(ray_spec_from_decl(f, d)));
        double eps = c.auto_eps();
        vis_matrix vm = compute_vis_matrix(t, m, S, ws, eps, c);
        int om = -1, eta = -1, mu = -1;
        for (int i = 0; i < 3; ++i) {
            if (vm.labels[static_cast<std::size_t>(i)] == "class(x-ray)") om = i;
            if (vm.labels[static_cast<std::size_t>(i)] == "class(y-antiray)") eta = i;
            if (vm.labels[static_cast<std::size_t>(i)] == "class(z-antiray)") mu = i;
        }
        auto D = [&](int i, int j) { return vm.d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
        auto R = [&](int i, int j) { return vm.rho_eps[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
        fwd_eta.push_back(D(om, eta));
        fwd_mu.push_back(D(om, mu));
        floor_ok = floor_ok && D(eta, mu) >= 0.5 * R(eta, mu) && D(mu, eta) >= 0.5 * R(mu, eta);
        trend.push_back({{"N", radius},
                         {"d_omega_eta", D(om, eta)},
                         {"d_omega_mu", D(om, mu)},
                         {"d_eta_mu", D(eta, mu)},
                         {"d_mu_eta", D(mu, eta)},
                         {"eps", eps}});
    }
    es.push_back({"d(omega,eta) strictly decreasing over N=12,16,20",
                  fwd_eta[0] > fwd_eta[1] && fwd_eta[1] > fwd_eta[2]});
    es.push_back({"d(omega,mu) strictly decreasing over N=12,16,20",
                  fwd_mu[0] > fwd_mu[1] && fwd_mu[1] > fwd_mu[2]});
    es.push_back({"d between the anti-ray classes stays above half its direct weight", floor_ok});

    classification c = classify(final_t, builtin_rays(f), final_t.origin_ids(), {4, 6, -1});
    bool three = c.classes.size() == 3;
    es.push_back({"3 boundary classes", three});
    bool rel_ok = false;
    if (three) {
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
        rel_ok = om >= 0 && L(om, eta) && L(om, mu) && !L(eta, om) && !L(mu, om) && !L(eta, mu) && !L(mu, eta);
    }
    es.push_back({"omega below both, anti-ray classes incomparable", rel_ok});

    json j;
    j["classification"] = classification_report(final_t, c);
    j["chain_distance_trend"] = trend;
    return j;
}

using recipe_fn = json (*)(std::vector<expectation>&);

const std::vector<std::pair<std::string, recipe_fn>>& recipes() {
    static const std::vector<std::pair<std::string, recipe_fn>> r = {
        {"nat-one-point", recipe_nat_one_point},
        {"int-two-points", recipe_int_two_points},
        {"monoid-ab-one-point", recipe_monoid_ab_one_point},
        {"ex71-boundary", recipe_ex71_boundary},
        {"ex92-zero-distance", recipe_ex92_zero_distance},
    };
    return r;
}

json run_recipe(const std::string& name, bool& passed) {
    for (const auto& [n, fn] : recipes()) {
        if (n != name) continue;
        std::vector<expectation> es;
        json body = fn(es);
        body["recipe"] = n;
        body["expectations"] = expectations_json(es, passed);
        body["passed"] = passed;
        return body;
    }
    throw usage_error("unknown recipe: " + name);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"directed-graph hyperbolicity toolkit"};
    app.require_subcommand(0, 1);
    cli_ctx ctx;
    {
        std::string cmdline;
        for (int i = 1; i < argc; ++i) {
            if (i > 1) cmdline += ' ';
            cmdline += argv[i];
        }
        ctx.manifest.command = cmdline;
    }
    app.add_flag("--pretty", ctx.pretty, "human-readable JSON");
    bool want_version = false;
    app.add_flag("--version", want_version, "print tool version");

    int rc = 0;

    // version
    auto* cmd_version = app.add_subcommand("version", "tool version");

    // ingest
    auto* cmd_ingest = app.add_subcommand("ingest", "read a digraph and emit canonical json");
    graph_source ingest_src;
    ingest_src.add_options(cmd_ingest);

    // gen
    auto* cmd_gen = app.add_subcommand("gen", "expand a generated family to a truncation");
    std::string gen_family;
    int gen_radius = 8;
    std::string gen_start;
    cmd_gen->add_option("--family", gen_family, "family name")->required();
    cmd_gen->add_option("--radius,--N", gen_radius, "truncation radius");
    cmd_gen->add_option("--start", gen_start, "comma-separated start vertices (default: family origin)");

    // dist
    auto* cmd_dist = app.add_subcommand("dist", "directed distance query");
    graph_source dist_src;
    dist_src.add_options(cmd_dist);
    std::string dist_from, dist_to;
    bool dist_sym_flag = false;
    cmd_dist->add_option("--from", dist_from)->required();
    cmd_dist->add_option("--to", dist_to)->required();
    cmd_dist->add_flag("--sym", dist_sym_flag, "also report the two-way minimum");

    // delta
    auto* cmd_delta = app.add_subcommand("delta", "thin-triangle constant");
    graph_source delta_src;
    delta_src.add_options(cmd_delta);
    std::string delta_mode = "exact";
    std::int64_t delta_samples = 1000;
    std::string delta_seed;
    cmd_delta->add_option("--mode", delta_mode)->check(CLI::IsMember({"exact", "sampled"}));
    cmd_delta->add_option("--samples", delta_samples);
    cmd_delta->add_option("--seed", delta_seed, "required in sampled mode");

    // bprofile
    auto* cmd_bprofile = app.add_subcommand("bprofile", "ball distance-bound profile");
    graph_source bp_src;
    bp_src.add_options(cmd_bprofile);
    std::string bp_side = "out";
    std::int64_t bp_rmax = 4;
    cmd_bprofile->add_option("--side", bp_side)->check(CLI::IsMember({"out", "in"}));
    cmd_bprofile->add_option("--rmax", bp_rmax);

    // triangles-audit
    auto* cmd_taudit = app.add_subcommand("triangles-audit", "length and fellow-travel triangle audits");
    graph_source ta_src;
    ta_src.add_options(cmd_taudit);
    std::string ta_eps = "1";
    cmd_taudit->add_option("--eps", ta_eps, "rational epsilon (default 1)");

    // boundary classes / relate
    auto* cmd_boundary = app.add_subcommand("boundary", "boundary quasiorder operations");
    cmd_boundary->require_subcommand(1);
    auto* cmd_bclasses = cmd_boundary->add_subcommand("classes", "classify rays into boundary points");
    std::string bc_family, bc_rays = "builtin";
    int bc_N = 20;
    std::int64_t bc_M = 4, bc_r = 6;
    cmd_bclasses->add_option("--family", bc_family)->required();
    cmd_bclasses->add_option("--rays", bc_rays, "'builtin' or a json file");
    cmd_bclasses->add_option("--N", bc_N);
    cmd_bclasses->add_option("--M", bc_M);
    cmd_bclasses->add_option("--r", bc_r);
    auto* cmd_brelate = cmd_boundary->add_subcommand("relate", "single pair relation verdicts");
    std::string br_family, br_r1, br_r2;
    int br_N = 20;
    std::int64_t br_M = 4, br_r = 6;
    cmd_brelate->add_option("--family", br_family)->required();
    cmd_brelate->add_option("--r1", br_r1)->required();
    cmd_brelate->add_option("--r2", br_r2)->required();
    cmd_brelate->add_option("--N", br_N);
    cmd_brelate->add_option("--M", br_M);
    cmd_brelate->add_option("--r", br_r);

    // ends
    auto* cmd_ends = app.add_subcommand("ends", "end relation operations");
    cmd_ends->require_subcommand(1);
    auto* cmd_eclasses = cmd_ends->add_subcommand("classes", "classify rays into ends");
    std::string ec_family, ec_rays = "builtin";
    int ec_N = 20;
    std::int64_t ec_r = 6;
    bool ec_recheck = false;
    cmd_eclasses->add_option("--family", ec_family)->required();
    cmd_eclasses->add_option("--rays", ec_rays);
    cmd_eclasses->add_option("--N", ec_N);
    cmd_eclasses->add_option("--r", ec_r);
    cmd_eclasses->add_flag("--recheck", ec_recheck, "re-run negative verdicts at N+5");

    // refine
    auto* cmd_refine = app.add_subcommand("refine", "boundary-to-ends refinement audit");
    std::string rf_family, rf_rays = "builtin";
    int rf_N = 20;
    std::int64_t rf_M = 4, rf_r = 6;
    cmd_refine->add_option("--family", rf_family)->required();
    cmd_refine->add_option("--rays", rf_rays);
    cmd_refine->add_option("--N", rf_N);
    cmd_refine->add_option("--M", rf_M);
    cmd_refine->add_option("--r", rf_r);

    // vismetric
    auto* cmd_vis = app.add_subcommand("vismetric", "visual pseudo-semimetric matrices and audits");
    std::string vm_family, vm_eps = "auto", vm_base = "auto", vm_working = "builtin";
    int vm_N = 16;
    std::int64_t vm_n0 = -1, vm_horizon = -1;
    cmd_vis->add_option("--family", vm_family)->required();
    cmd_vis->add_option("--N", vm_N);
    cmd_vis->add_option("--eps", vm_eps, "'auto' or a positive value");
    cmd_vis->add_option("--base", vm_base, "'auto' or comma-separated vertex names");
    cmd_vis->add_option("--working", vm_working, "'builtin' (classes) or comma-separated vertex names to add");
    cmd_vis->add_option("--n0", vm_n0);
    cmd_vis->add_option("--horizon", vm_horizon);

    // neighborhood
    auto* cmd_nb = app.add_subcommand("neighborhood", "boundary neighborhood sets");
    std::string nb_family, nb_class, nb_x, nb_side = "minus";
    int nb_N = 16;
    std::int64_t nb_r = 2, nb_horizon = -1;
    cmd_nb->add_option("--family", nb_family)->required();
    cmd_nb->add_option("--class", nb_class, "builtin ray name of the class representative")->required();
    cmd_nb->add_option("--x", nb_x, "ball center vertex")->required();
    cmd_nb->add_option("--r", nb_r);
    cmd_nb->add_option("--side", nb_side)->check(CLI::IsMember({"minus", "plus"}));
    cmd_nb->add_option("--N", nb_N);
    cmd_nb->add_option("--horizon", nb_horizon);

    // qi-check
    auto* cmd_qi = app.add_subcommand("qi-check", "verify a supplied quasi-isometry");
    std::string qi_g1, qi_g2, qi_spec_file;
    cmd_qi->add_option("--input", qi_g1, "domain digraph file")->required();
    cmd_qi->add_option("--input2", qi_g2, "codomain digraph file")->required();
    cmd_qi->add_option("--spec", qi_spec_file, "json {map, gamma, c}")->required();

    // recipe
    auto* cmd_recipe = app.add_subcommand("recipe", "canned example pipelines with expected outcomes");
    std::string rec_name;
    bool rec_all = false, rec_list = false;
    cmd_recipe->add_option("--name", rec_name);
    cmd_recipe->add_flag("--all", rec_all);
    cmd_recipe->add_flag("--list", rec_list);

    try {
        app.parse(argc, argv);

        if (want_version || cmd_version->parsed()) {
            json j;
            j["tool"] = version_string();
            ctx.emit(j, rc, 0);
            return rc;
        }
        if (app.get_subcommands().empty()) {
            std::cout << app.help() << "\n";
            return 0;
        }

        if (cmd_ingest->parsed()) {
            digraph g = ingest_src.load_graph(ctx);
            json j;
            j["digraph"] = digraph_to_json(g);
            j["vertex_count"] = g.vertex_count();
            j["edge_count"] = g.edge_count();
            ctx.emit(j, rc, 0);
        } else if (cmd_gen->parsed()) {
            family_ptr f = get_family(gen_family);
            ctx.manifest.inputs["family"] = gen_family;
            ctx.manifest.params["radius"] = gen_radius;
            truncation t;
            if (gen_start.empty()) {
                t = expand(f, gen_radius);
            } else {
                std::vector<std::string> start;
                std::stringstream ss(gen_start);
                std::string tok;
                while (std::getline(ss, tok, ',')) start.push_back(tok);
                ctx.manifest.params["start"] = start;
                t = expand(f, gen_radius, start);
            }
            json j;
            j["digraph"] = digraph_to_json(t.graph);
            j["vertex_count"] = t.graph.vertex_count();
            json fr = json::array();
            for (vertex_id v : t.frontier) fr.push_back(t.graph.name_of(v));
            j["frontier"] = fr;
            ctx.emit(j, rc, 0);
        } else if (cmd_dist->parsed()) {
            json j;
            if (dist_src.is_family()) {
                truncation t = dist_src.load_truncation(ctx);
                vertex_id u = t.graph.id_of(dist_from), v = t.graph.id_of(dist_to);
                ext_dist d = t.graph.dist(u, v);
                j["dist"] = ext_to_json(d);
                j["exact"] = t.dist_exact(u, v, d);
                if (dist_sym_flag) {
                    ext_dist back = t.graph.dist(v, u);
                    j["dist_back"] = ext_to_json(back);
                    j["dist_sym"] = ext_to_json(ext_dist::min(d, back));
                    j["exact_back"] = t.dist_exact(v, u, back);
                }
            } else {
                digraph g = dist_src.load_graph(ctx);
                vertex_id u = g.id_of(dist_from), v = g.id_of(dist_to);
                j["dist"] = ext_to_json(g.dist(u, v));
                j["exact"] = true;
                if (dist_sym_flag) j["dist_sym"] = ext_to_json(g.dist_sym(u, v));
            }
            ctx.emit(j, rc, 0);
        } else if (cmd_delta->parsed()) {
            digraph g = delta_src.load_graph(ctx);
            ctx.manifest.params["mode"] = delta_mode;
            dist_matrix m(g);
            delta_result r;
            if (delta_mode == "sampled") {
                if (delta_seed.empty())
                    throw usage_error("sampled mode requires an explicit --seed");
                ctx.manifest.params["seed"] = delta_seed;
                ctx.manifest.params["samples"] = delta_samples;
                r = delta_of_sampled(g, m, std::stoull(delta_seed), delta_samples);
            } else {
                r = delta_of_exact(g, m);
            }
            json j;
            j["delta"] = r.delta;
            j["mode"] = delta_mode;
            if (r.sampled) j["lower_bound_only"] = true;
            j["triangles_checked"] = r.triangles_checked;
            j["witness"] = {{"P", walk_to_json(g, r.witness.side_p)},
                            {"Q", walk_to_json(g, r.witness.side_q)},
                            {"R", walk_to_json(g, r.witness.side_r)}};
            ctx.emit(j, rc, 0);
        } else if (cmd_bprofile->parsed()) {
            digraph g = bp_src.load_graph(ctx);
            ctx.manifest.params["side"] = bp_side;
            ctx.manifest.params["rmax"] = bp_rmax;
            dist_matrix m(g);
            b_function_profile p = b_profile(g, m, bp_side == "out" ? side::out : side::in, bp_rmax);
            json j;
            j["side"] = bp_side;
            j["samples"] = p.samples;
            ctx.emit(j, rc, 0);
        } else if (cmd_taudit->parsed()) {
            digraph g = ta_src.load_graph(ctx);
            rational eps = parse_rational(ta_eps);
            ctx.manifest.params["eps"] = rational_str(eps);
            dist_matrix m(g);
            std::int64_t extra = (eps.numerator() + eps.denominator() - 1) / eps.denominator();
            derived_constants c = compute_constants(g, m, std::max<std::int64_t>(1, extra));
            audit_report a33 = audit_triangle_length_bounds(g, m, c.delta, c.prof_out, c.prof_in, eps);
            audit_report a34 = audit_fellow_travel(g, m, c);
            json j;
            j["constants"] = c.to_json();
            j["length_bounds"] = a33.to_json();
            j["fellow_travel"] = a34.to_json();
            ctx.emit(j, rc, a33.passed() && a34.passed() ? 0 : 1);
        } else if (cmd_bclasses->parsed()) {
            family_ptr f = get_family(bc_family);
            ctx.manifest.inputs["family"] = bc_family;
            ctx.manifest.params["N"] = bc_N;
            ctx.manifest.params["M"] = bc_M;
            ctx.manifest.params["r"] = bc_r;
            truncation t = expand(f, bc_N);
            classification c = classify(t, resolve_rays(f, bc_rays, ctx), t.origin_ids(), {bc_M, bc_r, -1});
            json j;
            j["classification"] = classification_report(t, c);
            j["no3chain"] = audit_no_3_chain(c).to_json();
            ctx.emit(j, rc, 0);
        } else if (cmd_brelate->parsed()) {
            family_ptr f = get_family(br_family);
            ctx.manifest.inputs["family"] = br_family;
            ctx.manifest.params["N"] = br_N;
            ctx.manifest.params["M"] = br_M;
            ctx.manifest.params["r"] = br_r;
            truncation t = expand(f, br_N);
            ray_spec a = resolve_one_ray(f, br_r1), b = resolve_one_ray(f, br_r2);
            auto [fwd, bwd] = relate_equiv(t, a, b, t.origin_ids(), {br_M, br_r, -1});
            json j;
            j["r1"] = a.name;
            j["r2"] = b.name;
            j["forward"] = fwd.to_json(t.graph);
            j["backward"] = bwd.to_json(t.graph);
            j["equivalent_at_resolution"] = fwd.holds() && bwd.holds();
            ctx.emit(j, rc, 0);
        } else if (cmd_eclasses->parsed()) {
            family_ptr f = get_family(ec_family);
            ctx.manifest.inputs["family"] = ec_family;
            ctx.manifest.params["N"] = ec_N;
            ctx.manifest.params["r"] = ec_r;
            truncation t = expand(f, ec_N);
            auto rays = resolve_rays(f, ec_rays, ctx);
            classification c = classify_ends(t, rays, t.origin_ids(), {-1, ec_r, -1});
            json j;
            j["classification"] = classification_report(t, c);
            if (ec_recheck) {
                truncation t2 = expand(f, ec_N + 5);
                classification c2 = classify_ends(t2, rays, t2.origin_ids(), {-1, ec_r, -1});
                j["recheck_stable"] = c2.classes.size() == c.classes.size() && c2.leq == c.leq;
            }
            ctx.emit(j, rc, 0);
        } else if (cmd_refine->parsed()) {
            family_ptr f = get_family(rf_family);
            ctx.manifest.inputs["family"] = rf_family;
            ctx.manifest.params["N"] = rf_N;
            ctx.manifest.params["M"] = rf_M;
            ctx.manifest.params["r"] = rf_r;
            truncation t = expand(f, rf_N);
            auto rays = resolve_rays(f, rf_rays, ctx);
            classification bc = classify(t, rays, t.origin_ids(), {rf_M, rf_r, -1});
            classification ecl = classify_ends(t, rays, t.origin_ids(), {-1, rf_r, -1});
            refinement_result rr = refinement_map(bc, ecl);
            json j;
            j["boundary"] = classification_report(t, bc);
            j["ends"] = classification_report(t, ecl);
            j["map"] = rr.map;
            j["audit"] = rr.report.to_json();
            ctx.emit(j, rc, rr.report.passed() ? 0 : 1);
        } else if (cmd_vis->parsed()) {
            family_ptr f = get_family(vm_family);
            ctx.manifest.inputs["family"] = vm_family;
            ctx.manifest.params["N"] = vm_N;
            ctx.manifest.params["eps"] = vm_eps;
            ctx.manifest.params["base"] = vm_base;
            ctx.manifest.params["working"] = vm_working;
            truncation t = expand(f, vm_N);
            dist_matrix m(t.graph);
            derived_constants c = compute_constants(t.graph, m, 1);
            base_point_set S;
            if (vm_base == "auto") {
                S = default_base(t);
            } else {
                std::vector<vertex_id> members;
                std::stringstream ss(vm_base);
                std::string tok;
                while (std::getline(ss, tok, ',')) members.push_back(t.graph.id_of(tok));
                S = make_base(t, members);
            }
            working_set ws;
            ws.n0 = vm_n0;
            ws.horizon = vm_horizon;
            for (const auto& d : f->rays) ws.points.push_back(working_point::boundary(ray_spec_from_decl(f, d)));
            if (vm_working != "builtin") {
                std::stringstream ss(vm_working);
                std::string tok;
                while (std::getline(ss, tok, ','))
                    ws.points.push_back(working_point::vertex(t, t.graph.id_of(tok)));
            }
            double eps = vm_eps == "auto" ? c.auto_eps() : std::stod(vm_eps);
            vis_matrix vm2 = compute_vis_matrix(t, m, S, ws, eps, c);
            audit_report qa = audit_quasi_ultrametric(vm2, c);
            audit_report sa = audit_visual_sandwich(vm2, c);
            json j;
            j["constants"] = c.to_json();
            j["matrix"] = vm2.to_json();
            j["quasi_ultrametric"] = qa.to_json();
            j["visual_sandwich"] = sa.to_json();
            ctx.emit(j, rc, qa.passed() && sa.passed() ? 0 : 1);
        } else if (cmd_nb->parsed()) {
            family_ptr f = get_family(nb_family);
            ctx.manifest.inputs["family"] = nb_family;
            ctx.manifest.params["N"] = nb_N;
            ctx.manifest.params["r"] = nb_r;
            ctx.manifest.params["class"] = nb_class;
            ctx.manifest.params["side"] = nb_side;
            truncation t = expand(f, nb_N);
            dist_matrix m(t.graph);
            boundary_class omega;
            omega.representatives = {resolve_one_ray(f, nb_class)};
            omega.has_ray = omega.representatives[0].kind == ray_kind::ray;
            omega.has_anti_ray = omega.representatives[0].kind == ray_kind::anti_ray;
            neighborhood_result nr = neighborhood(t, m, omega, t.graph.id_of(nb_x), nb_r,
                                                  nb_side == "minus" ? nbhd_side::minus : nbhd_side::plus,
                                                  nb_horizon);
            json j;
            json mem = json::array();
            for (std::size_t i = 0; i < nr.members.size(); ++i)
                mem.push_back({{"vertex", t.graph.name_of(nr.members[i])}, {"tail_start", nr.tail_start[i]}});
            j["members"] = mem;
            j["count"] = nr.members.size();
            ctx.emit(j, rc, 0);
        } else if (cmd_qi->parsed()) {
            std::string b1 = slurp(qi_g1), b2 = slurp(qi_g2), bs = slurp(qi_spec_file);
            ctx.manifest.inputs[qi_g1] = fnv1a_hex(b1);
            ctx.manifest.inputs[qi_g2] = fnv1a_hex(b2);
            ctx.manifest.inputs[qi_spec_file] = fnv1a_hex(bs);
            auto load = [](const std::string& bytes) {
                auto pos = bytes.find_first_not_of(" \t\r\n");
                if (pos != std::string::npos && bytes[pos] == '{')
                    return digraph_from_json(json::parse(bytes));
                return ingest_edge_list(bytes);
            };
            digraph g1 = load(b1);
            digraph g2 = load(b2);
            qi_spec spec = qi_spec_from_json(g1, g2, json::parse(bs));
            qi_report rep = qi_check(g1, g2, spec);
            json j;
            j["checked_pairs"] = rep.checked_pairs;
            j["checked_codensity"] = rep.checked_codensity;
            json vio = json::array();
            for (std::size_t i = 0; i < rep.violations.size() && i < 100; ++i)
                vio.push_back({{"kind", rep.violations[i].kind},
                               {"x", rep.violations[i].x},
                               {"y", rep.violations[i].y},
                               {"detail", rep.violations[i].detail}});
            j["violations"] = vio;
            j["violation_count"] = rep.violations.size();
            j["passed"] = rep.passed();
            ctx.emit(j, rc, rep.passed() ? 0 : 1);
        } else if (cmd_recipe->parsed()) {
            if (rec_list) {
                json j;
                json names = json::array();
                for (const auto& [n, _] : recipes()) names.push_back(n);
                j["recipes"] = names;
                ctx.emit(j, rc, 0);
            } else if (rec_all) {
                json all = json::array();
                bool ok = true;
                for (const auto& [n, _] : recipes()) {
                    bool one = false;
                    all.push_back(run_recipe(n, one));
                    ok = ok && one;
                }
                json j;
                j["recipes"] = all;
                j["passed"] = ok;
                ctx.emit(j, rc, ok ? 0 : 1);
            } else if (!rec_name.empty()) {
                bool ok = false;
                json j = run_recipe(rec_name, ok);
                ctx.emit(j, rc, ok ? 0 : 1);
            } else {
                throw usage_error("recipe needs --name, --all, or --list");
            }
        }
        return rc;
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help() << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        json err;
        err["error"] = {{"kind", "usage"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const error& e) {
        json err;
        err["error"] = {{"kind", kind_name(e.kind())}, {"message", e.what()}};
        if (e.suggested_radius >= 0) err["error"]["suggested_radius"] = e.suggested_radius;
        std::cerr << err.dump() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        json err;
        err["error"] = {{"kind", "internal"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
}
