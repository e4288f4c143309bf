#include "dhg/boundary.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <unordered_map>

#include "dhg/errors.hpp"

namespace dhg {

json resolution_verdict::to_json(const digraph& g) const {
    json j;
    j["relation"] = relation;
    if (path_bound >= 0) j["M"] = path_bound;
    j["r"] = avoid_radius;
    j["N"] = trunc_radius;
    switch (outcome) {
        case verdict_outcome::holds:
            j["outcome"] = "holds";
            j["witness"] = walk_to_json(g, witness);
            break;
        case verdict_outcome::fails_exhausted:
            j["outcome"] = "fails-exhausted";
            break;
        case verdict_outcome::inconclusive:
            j["outcome"] = "inconclusive";
            break;
    }
    if (!note.empty()) j["note"] = note;
    return j;
}

namespace {

std::vector<bool> avoid_set(const truncation& t, const std::vector<vertex_id>& base, std::int64_t r) {
    std::vector<bool> avoid(t.graph.vertex_count(), false);
    for (vertex_id v : t.graph.ball(base, r, side::out)) avoid[static_cast<std::size_t>(v)] = true;
    for (vertex_id v : t.graph.ball(base, r, side::in)) avoid[static_cast<std::size_t>(v)] = true;
    return avoid;
}

// BFS through the complement of `avoid`, depth-capped when max_len >= 0.
// Returns a shortest source->target path, empty if none.
walk avoiding_path(const digraph& g, const std::vector<vertex_id>& sources,
                   const std::vector<vertex_id>& targets, const std::vector<bool>& avoid,
                   std::int64_t max_len) {
    std::vector<bool> is_target(g.vertex_count(), false);
    for (vertex_id v : targets)
        if (!avoid[static_cast<std::size_t>(v)]) is_target[static_cast<std::size_t>(v)] = true;
    std::vector<vertex_id> parent(g.vertex_count(), -2); // -2 unvisited, -1 root
    std::deque<std::pair<vertex_id, std::int64_t>> q;
    for (vertex_id s : sources) {
        if (avoid[static_cast<std::size_t>(s)] || parent[static_cast<std::size_t>(s)] != -2) continue;
        parent[static_cast<std::size_t>(s)] = -1;
        q.emplace_back(s, 0);
    }
    auto build = [&](vertex_id v) {
        walk w{v};
        while (parent[static_cast<std::size_t>(w.back())] >= 0) w.push_back(parent[static_cast<std::size_t>(w.back())]);
        std::reverse(w.begin(), w.end());
        return w;
    };
    for (const auto& [s, d0] : q)
        if (is_target[static_cast<std::size_t>(s)]) return build(s);
    while (!q.empty()) {
        auto [u, d] = q.front();
        q.pop_front();
        if (max_len >= 0 && d >= max_len) continue;
        for (vertex_id z : g.out_neighbors(u)) {
            if (avoid[static_cast<std::size_t>(z)] || parent[static_cast<std::size_t>(z)] != -2) continue;
            parent[static_cast<std::size_t>(z)] = u;
            if (is_target[static_cast<std::size_t>(z)]) return build(z);
            q.emplace_back(z, d + 1);
        }
    }
    return {};
}

resolution_verdict relate_common(const truncation& t, const ray_spec& r1, const ray_spec& r2,
                                 const std::vector<vertex_id>& base, std::int64_t M, std::int64_t r,
                                 std::int64_t horizon, const char* relname) {
    resolution_verdict v;
    v.relation = relname;
    v.path_bound = M;
    v.avoid_radius = r;
    v.trunc_radius = t.radius;

    std::int64_t need = M >= 0 ? r + M + 1 : r + 2;
    if (t.radius < need)
        throw precondition_error(std::string(relname) + ": margin rule needs truncation radius >= " +
                                 std::to_string(need) + ", have " + std::to_string(t.radius));

    std::int64_t cap = horizon > 0 ? horizon : t.radius;
    std::vector<vertex_id> a = materialize_max(r1, t, cap);
    std::vector<vertex_id> b = materialize_max(r2, t, cap);
    if (a.empty())
        throw expansion_error("ray '" + r1.name + "' does not materialize inside the truncation",
                              t.radius + static_cast<int>(r) + 4);
    if (b.empty())
        throw expansion_error("ray '" + r2.name + "' does not materialize inside the truncation",
                              t.radius + static_cast<int>(r) + 4);
    std::int64_t reach_need = M >= 0 ? r + M : r + 1;
    if (static_cast<std::int64_t>(a.size()) <= reach_need || static_cast<std::int64_t>(b.size()) <= reach_need) {
        v.outcome = verdict_outcome::inconclusive;
        v.note = "ray prefixes do not extend past index " + std::to_string(reach_need) +
                 " inside the truncation";
        return v;
    }

    std::vector<bool> avoid = avoid_set(t, base, r);
    walk w = avoiding_path(t.graph, a, b, avoid, M);
    if (!w.empty()) {
        v.outcome = verdict_outcome::holds;
        v.witness = std::move(w);
        return v;
    }
    v.outcome = verdict_outcome::fails_exhausted;
    if (M < 0) v.note = "path length unbounded; exhaustion relative to the truncation";
    return v;
}

} // namespace

resolution_verdict relate_leq(const truncation& t, const ray_spec& r1, const ray_spec& r2,
                              const std::vector<vertex_id>& base, const resolution_params& p) {
    if (p.M < 0) throw precondition_error("relate_leq: M must be nonnegative");
    return relate_common(t, r1, r2, base, p.M, p.r, p.horizon, "leq");
}

resolution_verdict relate_end(const truncation& t, const ray_spec& r1, const ray_spec& r2,
                              const std::vector<vertex_id>& base, const resolution_params& p) {
    return relate_common(t, r1, r2, base, -1, p.r, p.horizon, "end");
}

std::pair<resolution_verdict, resolution_verdict> relate_equiv(const truncation& t, const ray_spec& r1,
                                                               const ray_spec& r2,
                                                               const std::vector<vertex_id>& base,
                                                               const resolution_params& p) {
    return {relate_leq(t, r1, r2, base, p), relate_leq(t, r2, r1, base, p)};
}

json boundary_class::to_json() const {
    json j;
    json reps = json::array();
    for (const auto& r : representatives) reps.push_back(r.name);
    j["representatives"] = reps;
    j["hasRay"] = has_ray;
    j["hasAntiRay"] = has_anti_ray;
    return j;
}

json classification::to_json(const digraph& g) const {
    (void)g;
    json j;
    json cls = json::array();
    for (const auto& c : classes) cls.push_back(c.to_json());
    j["classes"] = cls;
    json order = json::array();
    for (std::size_t i = 0; i < classes.size(); ++i)
        for (std::size_t k = 0; k < classes.size(); ++k)
            if (i != k && leq[i][k]) order.push_back(json::array({static_cast<int>(i), static_cast<int>(k)}));
    j["order"] = order;
    j["inconclusive"] = inconclusive();
    if (!notes.empty()) j["notes"] = notes;
    return j;
}

namespace {

classification classify_common(const truncation& t, const std::vector<ray_spec>& rays,
                               const std::vector<vertex_id>& base, const resolution_params& p,
                               bool bounded) {
    std::size_t n = rays.size();
    classification out;
    out.ray_verdicts.assign(n, {});
    resolution_params q = p;
    if (!bounded) q.M = -1;

    std::vector<std::vector<bool>> holds(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        out.ray_verdicts[i].resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            resolution_verdict v = relate_common(t, rays[i], rays[j], base, q.M, q.r, q.horizon,
                                                 bounded ? "leq" : "end");
            if (v.outcome == verdict_outcome::inconclusive)
                out.notes.push_back("pair (" + rays[i].name + ", " + rays[j].name + "): " + v.note);
            holds[i][j] = v.holds();
            out.ray_verdicts[i][j] = std::move(v);
        }
    }

    // union-find over mutual relatedness
    std::vector<std::size_t> uf(n);
    std::iota(uf.begin(), uf.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (uf[x] != x) x = uf[x] = uf[uf[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (holds[i][j] && holds[j][i]) uf[find(i)] = find(j);

    std::vector<std::vector<std::size_t>> groups;
    {
        std::unordered_map<std::size_t, std::size_t> root_to_group;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = find(i);
            auto it = root_to_group.find(r);
            if (it == root_to_group.end()) {
                root_to_group.emplace(r, groups.size());
                groups.push_back({i});
            } else {
                groups[it->second].push_back(i);
            }
        }
    }
    // canonical ordering: members by content key, groups by least member key
    for (auto& gmembers : groups)
        std::sort(gmembers.begin(), gmembers.end(), [&](std::size_t a, std::size_t b) {
            return rays[a].canonical_key() < rays[b].canonical_key();
        });
    std::sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) {
        return rays[a.front()].canonical_key() < rays[b.front()].canonical_key();
    });

    // transitivity inside groups
    for (const auto& gmembers : groups)
        for (std::size_t a : gmembers)
            for (std::size_t b : gmembers)
                if (a != b && !(holds[a][b] && holds[b][a]))
                    out.notes.push_back("relation not transitive at this resolution: " + rays[a].name +
                                        " vs " + rays[b].name);

    out.classes.reserve(groups.size());
    for (const auto& gmembers : groups) {
        boundary_class c;
        for (std::size_t i : gmembers) {
            c.representatives.push_back(rays[i]);
            if (rays[i].kind == ray_kind::ray) c.has_ray = true;
            if (rays[i].kind == ray_kind::anti_ray) c.has_anti_ray = true;
        }
        out.classes.push_back(std::move(c));
    }

    // induced order between classes; cross verdicts must agree
    std::size_t m = groups.size();
    out.leq.assign(m, std::vector<bool>(m, false));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            if (i == k) {
                out.leq[i][k] = true;
                continue;
            }
            bool any = false, all = true;
            for (std::size_t a : groups[i])
                for (std::size_t b : groups[k]) {
                    bool h = holds[a][b];
                    any = any || h;
                    all = all && h;
                }
            out.leq[i][k] = all;
            if (any && !all)
                out.notes.push_back("induced order ambiguous between classes " + std::to_string(i) +
                                    " and " + std::to_string(k) + " (resolution too coarse)");
        }
    }
    // antisymmetry between distinct classes
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = i + 1; k < m; ++k)
            if (out.leq[i][k] && out.leq[k][i])
                out.notes.push_back("antisymmetry violated between classes " + std::to_string(i) + " and " +
                                    std::to_string(k) + " (resolution too coarse)");
    return out;
}

} // namespace

classification classify(const truncation& t, const std::vector<ray_spec>& rays,
                        const std::vector<vertex_id>& base, const resolution_params& p) {
    return classify_common(t, rays, base, p, true);
}

classification classify_ends(const truncation& t, const std::vector<ray_spec>& rays,
                             const std::vector<vertex_id>& base, const resolution_params& p) {
    return classify_common(t, rays, base, p, false);
}

audit_report audit_no_3_chain(const classification& c) {
    audit_report rep;
    rep.lemma = "boundary-order-chain-bound";
    std::size_t m = c.classes.size();
    auto lt = [&](std::size_t i, std::size_t k) { return i != k && c.leq[i][k] && !c.leq[k][i]; };
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            if (!lt(i, k)) continue;
            ++rep.checked;
            // content restriction: one side has no ray, the other no anti-ray
            bool ok = (!c.classes[i].has_ray && !c.classes[k].has_anti_ray) ||
                      (!c.classes[k].has_ray && !c.classes[i].has_anti_ray);
            if (!ok)
                rep.add_violation({{"kind", "content"},
                                   {"lower", static_cast<int>(i)},
                                   {"upper", static_cast<int>(k)}});
            for (std::size_t l = 0; l < m; ++l) {
                if (lt(k, l))
                    rep.add_violation({{"kind", "chain"},
                                       {"classes", {static_cast<int>(i), static_cast<int>(k), static_cast<int>(l)}}});
            }
        }
    }
    return rep;
}

} // namespace dhg
