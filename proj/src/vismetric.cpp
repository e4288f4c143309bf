#include "dhg/vismetric.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "dhg/errors.hpp"

namespace dhg {

base_point_set make_base(const truncation& t, const std::vector<vertex_id>& members) {
    if (members.empty()) throw parameter_error("base point set must be nonempty");
    std::size_t n = t.graph.vertex_count();
    std::vector<bool> covered(n, false);
    for (vertex_id s : members) {
        std::vector<ext_dist> from = t.graph.dist_from(s);
        std::vector<ext_dist> to = t.graph.dist_to(s);
        for (std::size_t v = 0; v < n; ++v)
            if (from[v].is_finite() || to[v].is_finite()) covered[v] = true;
    }
    for (std::size_t v = 0; v < n; ++v)
        if (!covered[v])
            throw parameter_error("not a base at truncation scale: vertex '" +
                                  t.graph.name_of(static_cast<vertex_id>(v)) +
                                  "' has no finite two-way distance to any member");
    return base_point_set{members};
}

base_point_set default_base(const truncation& t) { return make_base(t, t.base_ids()); }

working_point working_point::vertex(const truncation& t, vertex_id v) {
    t.graph.check_vertex(v);
    working_point p;
    p.is_vertex = true;
    p.v = v;
    p.label = t.graph.name_of(v);
    return p;
}

working_point working_point::boundary(const ray_spec& rep) {
    working_point p;
    p.is_vertex = false;
    p.rep = rep;
    p.label = "class(" + rep.name + ")";
    return p;
}

std::int64_t working_set::effective_horizon(const truncation& t) const {
    return horizon > 0 ? horizon : std::max<std::int64_t>(4, t.radius - 2);
}

std::int64_t working_set::operative_n0(const truncation& t) const {
    return n0 >= 0 ? n0 : effective_horizon(t) / 2;
}

json rho_estimate::to_json() const {
    json j;
    j["kind"] = exact ? "exact" : "window";
    if (disconnected) {
        j["value"] = "inf";
        j["disconnected"] = true;
    } else {
        j["value"] = value;
    }
    j["stabilized"] = stabilized;
    if (!exact) {
        json w = json::array();
        for (std::int64_t x : windows) w.push_back(x < 0 ? json("empty") : json(x));
        j["windows"] = w;
    }
    if (!witness.is_null()) j["witness"] = witness;
    return j;
}

namespace {

struct point_stream {
    // materialized (index, vertex) positions; a plain vertex is index -1
    std::vector<std::pair<std::int64_t, vertex_id>> pos;
    bool windowed = false;
};

point_stream stream_of(const truncation& t, const working_point& p, std::int64_t horizon) {
    point_stream s;
    if (p.is_vertex) {
        s.pos.emplace_back(-1, p.v);
        return s;
    }
    s.windowed = true;
    std::vector<vertex_id> ids = materialize_max(p.rep, t, horizon);
    for (std::size_t i = 0; i < ids.size(); ++i)
        s.pos.emplace_back(static_cast<std::int64_t>(i), ids[i]);
    return s;
}

struct pair_data {
    // per (i,j) feasible pair: window key = min over the windowed sides of
    // the ray indices involved; value = per-base-member min of dsym over
    // on-geodesic vertices
    struct entry {
        std::int64_t key;
        std::int64_t i, j;
        vertex_id a, b;
        std::vector<std::int64_t> per_s; // min dsym; unreachable if none
        vertex_id arg_v = -1;            // witness vertex for per_s min (first member)
    };
    std::vector<entry> entries;
};

constexpr std::int64_t big = geodesic_extremes::unreachable;

pair_data collect_pairs(const truncation& t, const dist_matrix& m,
                        const std::vector<std::vector<std::int64_t>>& dsym,
                        const point_stream& A, const point_stream& B) {
    pair_data out;
    std::size_t n = t.graph.vertex_count();
    for (const auto& [i, a] : A.pos) {
        for (const auto& [j, b] : B.pos) {
            ext_dist d = m.at(a, b);
            if (d.is_infinite()) continue;
            pair_data::entry e;
            e.key = std::min(A.windowed ? i : big, B.windowed ? j : big);
            e.i = i;
            e.j = j;
            e.a = a;
            e.b = b;
            e.per_s.assign(dsym.size(), big);
            for (std::size_t v = 0; v < n; ++v) {
                ext_dist da = m.at(a, static_cast<vertex_id>(v));
                ext_dist db = m.at(static_cast<vertex_id>(v), b);
                if (da.is_infinite() || db.is_infinite() ||
                    da.value() + db.value() != d.value())
                    continue;
                for (std::size_t si = 0; si < dsym.size(); ++si) {
                    std::int64_t val = dsym[si][v];
                    if (val < e.per_s[si]) {
                        e.per_s[si] = val;
                        if (si == 0) e.arg_v = static_cast<vertex_id>(v);
                    }
                }
            }
            out.entries.push_back(std::move(e));
        }
    }
    return out;
}

// window values for one base member index
struct window_summary {
    std::array<std::int64_t, 3> vals{-1, -1, -1};
    std::int64_t operative = -1;
    bool tail_connected = false;
};

window_summary summarize(const pair_data& pd, std::size_t si, std::int64_t h, std::int64_t opn0,
                         bool windowed) {
    window_summary s;
    std::array<std::int64_t, 3> starts{h / 4, h / 2, (3 * h) / 4};
    if (!windowed) {
        // single exact collection
        std::int64_t best = big;
        for (const auto& e : pd.entries) best = std::min(best, e.per_s[si]);
        if (!pd.entries.empty()) {
            s.vals = {best, best, best};
            s.operative = best;
            s.tail_connected = true;
        }
        return s;
    }
    auto window_min = [&](std::int64_t n0) -> std::int64_t {
        std::int64_t best = -1;
        for (const auto& e : pd.entries) {
            std::int64_t lo = std::min(e.i < 0 ? big : e.i, e.j < 0 ? big : e.j);
            if (lo < n0) continue;
            if (best < 0 || e.per_s[si] < best) best = e.per_s[si];
        }
        return best;
    };
    for (int k = 0; k < 3; ++k) s.vals[static_cast<std::size_t>(k)] = window_min(starts[static_cast<std::size_t>(k)]);
    s.operative = window_min(opn0);
    s.tail_connected = s.vals[2] >= 0;
    return s;
}

} // namespace

rho_estimate rho_s(const truncation& t, const dist_matrix& m, vertex_id s, const working_point& a,
                   const working_point& b, const working_set& ws) {
    t.graph.check_vertex(s);
    std::int64_t h = ws.effective_horizon(t);
    std::int64_t opn0 = ws.operative_n0(t);
    std::vector<std::vector<std::int64_t>> dsym(1, std::vector<std::int64_t>(t.graph.vertex_count(), big));
    for (std::size_t v = 0; v < t.graph.vertex_count(); ++v) {
        ext_dist d = m.sym(s, static_cast<vertex_id>(v));
        if (d.is_finite()) dsym[0][v] = d.value();
    }
    point_stream A = stream_of(t, a, h);
    point_stream B = stream_of(t, b, h);
    pair_data pd = collect_pairs(t, m, dsym, A, B);
    bool windowed = A.windowed || B.windowed;
    window_summary sum = summarize(pd, 0, h, opn0, windowed);

    rho_estimate est;
    est.exact = !windowed;
    est.windows = sum.vals;
    if (!sum.tail_connected || sum.operative < 0) {
        est.disconnected = true;
        est.stabilized = true;
        return est;
    }
    est.value = sum.operative;
    est.stabilized = est.exact || (sum.vals[1] >= 0 && sum.vals[1] == sum.vals[2]);
    // witness: first entry attaining the operative value
    for (const auto& e : pd.entries) {
        std::int64_t lo = std::min(e.i < 0 ? big : e.i, e.j < 0 ? big : e.j);
        if (windowed && lo < opn0) continue;
        if (e.per_s[0] == est.value) {
            est.witness = {{"from", t.graph.name_of(e.a)},
                           {"to", t.graph.name_of(e.b)},
                           {"at", e.arg_v >= 0 ? t.graph.name_of(e.arg_v) : ""},
                           {"i", e.i},
                           {"j", e.j}};
            break;
        }
    }
    return est;
}

double rho_eps_of(const rho_estimate& e, double eps) {
    if (e.disconnected) return 1.0;
    return std::exp(-eps * static_cast<double>(e.value));
}

double rho_eps_value(ext_dist rho, double eps) {
    if (rho.is_infinite()) return 0.0;
    return std::exp(-eps * static_cast<double>(rho.value()));
}

double rho_S_eps(const truncation& t, const dist_matrix& m, const base_point_set& S,
                 const working_point& a, const working_point& b, const working_set& ws, double eps,
                 const derived_constants& c) {
    double ep = c.eps_prime(eps);
    if (!(ep < std::sqrt(2.0)))
        throw parameter_error("eps gate violated: eps_prime(eps) = " + std::to_string(ep) +
                              " >= sqrt(2); maximal admissible eps = " +
                              std::to_string(c.max_admissible_eps()));
    double best = 0.0;
    for (vertex_id s : S.members) best = std::max(best, rho_eps_of(rho_s(t, m, s, a, b, ws), eps));
    return best;
}

vis_matrix compute_vis_matrix(const truncation& t, const dist_matrix& m, const base_point_set& S,
                              const working_set& ws, double eps, const derived_constants& c) {
    if (eps <= 0) throw parameter_error("eps must be positive");
    double ep = c.eps_prime(eps);
    if (!(ep < std::sqrt(2.0)))
        throw parameter_error("eps gate violated: eps_prime(eps) = " + std::to_string(ep) +
                              " >= sqrt(2); maximal admissible eps = " +
                              std::to_string(c.max_admissible_eps()));

    std::int64_t h = ws.effective_horizon(t);
    std::int64_t opn0 = ws.operative_n0(t);
    std::size_t n = t.graph.vertex_count();
    std::size_t k = ws.points.size();

    std::vector<std::vector<std::int64_t>> dsym(S.members.size(), std::vector<std::int64_t>(n, big));
    for (std::size_t si = 0; si < S.members.size(); ++si)
        for (std::size_t v = 0; v < n; ++v) {
            ext_dist d = m.sym(S.members[si], static_cast<vertex_id>(v));
            if (d.is_finite()) dsym[si][v] = d.value();
        }

    std::vector<point_stream> streams;
    streams.reserve(k);
    for (const auto& p : ws.points) streams.push_back(stream_of(t, p, h));

    vis_matrix vm;
    vm.eps = eps;
    vm.n0 = opn0;
    vm.horizon = h;
    for (const auto& p : ws.points) vm.labels.push_back(p.label);
    vm.rho_min.assign(k, std::vector<rho_estimate>(k));
    vm.rho_eps.assign(k, std::vector<double>(k, 0.0));
    vm.stabilized.assign(k, std::vector<bool>(k, false));
    vm.argmin_rho.assign(k, std::vector<int>(k, 0));
    vm.argmax_eps.assign(k, std::vector<int>(k, 0));

    for (std::size_t ia = 0; ia < k; ++ia) {
        for (std::size_t ib = 0; ib < k; ++ib) {
            pair_data pd = collect_pairs(t, m, dsym, streams[ia], streams[ib]);
            bool windowed = streams[ia].windowed || streams[ib].windowed;
            double best_eps = -1;
            int best_eps_s = 0;
            rho_estimate best_rho;
            bool have_rho = false;
            int best_rho_s = 0;
            bool entry_stab = true;
            for (std::size_t si = 0; si < S.members.size(); ++si) {
                window_summary sum = summarize(pd, si, h, opn0, windowed);
                rho_estimate est;
                est.exact = !windowed;
                est.windows = sum.vals;
                if (!sum.tail_connected || sum.operative < 0) {
                    est.disconnected = true;
                    est.stabilized = true;
                } else {
                    est.value = sum.operative;
                    est.stabilized = est.exact || (sum.vals[1] >= 0 && sum.vals[1] == sum.vals[2]);
                }
                double re = rho_eps_of(est, eps);
                if (re > best_eps) {
                    best_eps = re;
                    best_eps_s = static_cast<int>(si);
                }
                if (!have_rho ||
                    (est.disconnected ? ext_dist::infinity() : ext_dist::finite(est.value)) <
                        (best_rho.disconnected ? ext_dist::infinity() : ext_dist::finite(best_rho.value))) {
                    best_rho = est;
                    best_rho_s = static_cast<int>(si);
                    have_rho = true;
                }
                entry_stab = entry_stab && est.stabilized;
            }
            vm.rho_eps[ia][ib] = best_eps;
            vm.rho_min[ia][ib] = best_rho;
            vm.stabilized[ia][ib] = entry_stab;
            vm.argmin_rho[ia][ib] = best_rho_s;
            vm.argmax_eps[ia][ib] = best_eps_s;
        }
    }

    // chain infimum restricted to the working set
    vm.d.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) vm.d[i][j] = i == j ? 0.0 : vm.rho_eps[i][j];
    for (std::size_t mid = 0; mid < k; ++mid)
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                if (vm.d[i][mid] + vm.d[mid][j] < vm.d[i][j]) vm.d[i][j] = vm.d[i][mid] + vm.d[mid][j];
    return vm;
}

json vis_matrix::to_json() const {
    json j;
    j["points"] = labels;
    j["eps"] = eps;
    j["window"] = {n0, horizon};
    json re = json::array(), dd = json::array(), rr = json::array(), st = json::array();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        json rowe = json::array(), rowd = json::array(), rowr = json::array(), rows = json::array();
        for (std::size_t k2 = 0; k2 < labels.size(); ++k2) {
            rowe.push_back(rho_eps[i][k2]);
            rowd.push_back(d[i][k2]);
            rowr.push_back(rho_min[i][k2].to_json());
            rows.push_back(static_cast<bool>(stabilized[i][k2]));
        }
        re.push_back(rowe);
        dd.push_back(rowd);
        rr.push_back(rowr);
        st.push_back(rows);
    }
    j["rho_eps"] = re;
    j["d"] = dd;
    j["rho"] = rr;
    j["stabilized"] = st;
    // chain distances this close to zero are evidence, never asserted exact
    json ze = json::array();
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t k2 = 0; k2 < labels.size(); ++k2)
            if (i != k2 && d[i][k2] < 1e-9)
                ze.push_back(json::array({static_cast<int>(i), static_cast<int>(k2)}));
    j["zero_evidence"] = ze;
    return j;
}

audit_report audit_quasi_ultrametric(const vis_matrix& vm, const derived_constants& c) {
    audit_report rep;
    rep.lemma = "quasi-ultrametric";
    double ep = c.eps_prime(vm.eps);
    std::size_t k = vm.labels.size();
    double worst = -1;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t mid = 0; mid < k; ++mid) {
                if (!vm.stabilized[i][j] || !vm.stabilized[i][mid] || !vm.stabilized[mid][j]) {
                    ++rep.skipped;
                    continue;
                }
                ++rep.checked;
                double lhs = vm.rho_eps[i][j];
                double rhs = ep * std::max(vm.rho_eps[i][mid], vm.rho_eps[mid][j]);
                if (lhs - rhs > worst) {
                    worst = lhs - rhs;
                    rep.extremal = {{"triple", {vm.labels[i], vm.labels[j], vm.labels[mid]}},
                                    {"lhs", lhs},
                                    {"rhs", rhs}};
                }
                if (lhs > rhs + 1e-12)
                    rep.add_violation({{"triple", {vm.labels[i], vm.labels[j], vm.labels[mid]}},
                                       {"lhs", lhs},
                                       {"rhs", rhs}});
            }
        }
    }
    return rep;
}

audit_report audit_visual_sandwich(const vis_matrix& vm, const derived_constants& c) {
    audit_report rep;
    rep.lemma = "visual-sandwich";
    double ep = c.eps_prime(vm.eps);
    double lo = 3.0 - 2.0 * ep;
    std::size_t k = vm.labels.size();
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            ++rep.checked;
            double dv = vm.d[i][j], re = vm.rho_eps[i][j];
            if (dv > re + 1e-12)
                rep.add_violation({{"pair", {vm.labels[i], vm.labels[j]}},
                                   {"side", "upper"},
                                   {"d", dv},
                                   {"rho_eps", re}});
            // the chain infimum over the empty chain makes the diagonal 0,
            // so the lower inequality applies off the diagonal
            if (i != j && lo * re > dv + 1e-12)
                rep.add_violation({{"pair", {vm.labels[i], vm.labels[j]}},
                                   {"side", "lower"},
                                   {"d", dv},
                                   {"bound", lo * re}});
        }
    }
    return rep;
}

std::vector<bool> ball_avoid(const digraph& g, const std::vector<vertex_id>& centers, std::int64_t r) {
    std::vector<bool> avoid(g.vertex_count(), false);
    for (vertex_id v : g.ball(centers, r, side::out)) avoid[static_cast<std::size_t>(v)] = true;
    for (vertex_id v : g.ball(centers, r, side::in)) avoid[static_cast<std::size_t>(v)] = true;
    return avoid;
}

bool avoiding_geodesic_exists(const digraph& g, const dist_matrix& m, vertex_id y, vertex_id z,
                              const std::vector<bool>& avoid) {
    ext_dist d = m.at(y, z);
    if (d.is_infinite()) return false;
    if (avoid[static_cast<std::size_t>(y)] || avoid[static_cast<std::size_t>(z)]) return false;
    if (y == z) return true;
    std::deque<vertex_id> q{y};
    std::vector<bool> seen(g.vertex_count(), false);
    seen[static_cast<std::size_t>(y)] = true;
    while (!q.empty()) {
        vertex_id u = q.front();
        q.pop_front();
        for (vertex_id w : g.out_neighbors(u)) {
            if (seen[static_cast<std::size_t>(w)] || avoid[static_cast<std::size_t>(w)]) continue;
            ext_dist a = m.at(y, w), b = m.at(w, z);
            if (a.is_infinite() || b.is_infinite() || a.value() + b.value() != d.value() ||
                a.value() != m.at(y, u).value() + 1)
                continue;
            if (w == z) return true;
            seen[static_cast<std::size_t>(w)] = true;
            q.push_back(w);
        }
    }
    return false;
}

bool neighborhood_result::contains(vertex_id v) const {
    return std::binary_search(members.begin(), members.end(), v);
}

neighborhood_result neighborhood(const truncation& t, const dist_matrix& m, const boundary_class& omega,
                                 vertex_id x, std::int64_t r, nbhd_side s, std::int64_t horizon) {
    t.graph.check_vertex(x);
    const ray_spec* rep = nullptr;
    for (const auto& cand : omega.representatives) {
        if (s == nbhd_side::minus && cand.kind == ray_kind::ray) rep = &cand;
        if (s == nbhd_side::plus && cand.kind == ray_kind::anti_ray) rep = &cand;
        if (rep) break;
    }
    if (!rep)
        throw domain_error(std::string("neighborhood side ") + (s == nbhd_side::minus ? "minus" : "plus") +
                           " needs a " + (s == nbhd_side::minus ? "ray" : "anti-ray") + " representative");

    std::int64_t h = horizon > 0 ? horizon : std::max<std::int64_t>(4, t.radius - 2);
    std::vector<vertex_id> ids = materialize_max(*rep, t, h);
    if (ids.size() < 3) throw expansion_error("representative materializes too short", t.radius + 4);
    std::vector<bool> avoid = ball_avoid(t.graph, {x}, r);

    neighborhood_result res;
    std::size_t n = t.graph.vertex_count();
    std::int64_t last = static_cast<std::int64_t>(ids.size()) - 1;
    for (std::size_t yv = 0; yv < n; ++yv) {
        vertex_id y = static_cast<vertex_id>(yv);
        if (avoid[yv]) continue;
        std::int64_t tstart = last + 1;
        for (std::int64_t j = last; j >= 0; --j) {
            vertex_id z = ids[static_cast<std::size_t>(j)];
            bool ok = s == nbhd_side::minus ? avoiding_geodesic_exists(t.graph, m, y, z, avoid)
                                            : avoiding_geodesic_exists(t.graph, m, z, y, avoid);
            if (!ok) break;
            tstart = j;
        }
        if (tstart <= last - 1) { // at least two tail witnesses
            res.members.push_back(y);
            res.tail_start.push_back(tstart);
        }
    }
    return res;
}

} // namespace dhg
