#include "dhg/rays.hpp"

#include <algorithm>
#include <unordered_set>

#include "dhg/errors.hpp"

namespace dhg {

std::string ray_spec::canonical_key() const {
    std::string k = family->name;
    k += '/';
    k += ray_kind_name(kind);
    k += '/';
    for (const auto& p : prefix) {
        k += p;
        k += ',';
    }
    k += '/';
    k += series;
    return k;
}

json ray_spec::to_json() const {
    json j;
    j["family"] = family->name;
    j["kind"] = ray_kind_name(kind);
    j["prefix"] = prefix;
    j["step"] = {{"rule", "family-successor"}, {"series", series}};
    j["name"] = name;
    return j;
}

ray_spec ray_spec_from_decl(family_ptr f, const ray_decl& d) {
    return ray_spec{f, d.name, d.kind, d.prefix, d.series};
}

ray_spec ray_spec_from_json(const json& j) {
    ray_spec r;
    r.family = get_family(j.at("family").get<std::string>());
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "ray")
        r.kind = ray_kind::ray;
    else if (kind == "antiray" || kind == "anti-ray")
        r.kind = ray_kind::anti_ray;
    else
        throw parse_error("ray kind must be 'ray' or 'antiray': " + kind);
    for (const auto& p : j.at("prefix")) r.prefix.push_back(p.get<std::string>());
    if (r.prefix.empty()) throw parse_error("ray prefix must be nonempty");
    if (j.contains("step")) {
        const json& st = j["step"];
        if (st.at("rule").get<std::string>() != "family-successor")
            throw parse_error("unknown step rule: " + st.at("rule").get<std::string>());
        r.series = st.at("series").get<std::string>();
    }
    r.name = j.value("name", r.canonical_key());
    return r;
}

std::vector<ray_spec> builtin_rays(family_ptr f) {
    std::vector<ray_spec> out;
    for (const auto& d : f->rays) out.push_back(ray_spec_from_decl(f, d));
    return out;
}

namespace {

std::vector<std::string> materialize_names(const ray_spec& r, std::int64_t up_to) {
    std::vector<std::string> names = r.prefix;
    while (static_cast<std::int64_t>(names.size()) <= up_to) {
        if (r.series.empty())
            throw expansion_error("ray '" + r.name + "' has no successor series beyond its prefix", -1);
        names.push_back(r.family->step(r.series, names.back()));
    }
    names.resize(static_cast<std::size_t>(up_to) + 1);
    return names;
}

void check_ray_edges(const ray_spec& r, const truncation& t, const std::vector<vertex_id>& ids) {
    std::unordered_set<vertex_id> seen;
    for (vertex_id v : ids)
        if (!seen.insert(v).second)
            throw domain_error("ray '" + r.name + "' repeats vertex " + t.graph.name_of(v));
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
        bool ok = r.kind == ray_kind::ray ? t.graph.has_arc(ids[i], ids[i + 1])
                                          : t.graph.has_arc(ids[i + 1], ids[i]);
        if (!ok)
            throw domain_error("ray '" + r.name + "' misses edge between " + t.graph.name_of(ids[i]) +
                               " and " + t.graph.name_of(ids[i + 1]));
    }
}

} // namespace

std::vector<vertex_id> materialize(const ray_spec& r, const truncation& t, std::int64_t up_to) {
    if (up_to < 0) throw precondition_error("materialize: horizon must be nonnegative");
    if (r.family->name != t.family->name)
        throw domain_error("ray belongs to family '" + r.family->name + "', truncation to '" + t.family->name + "'");
    std::vector<std::string> names = materialize_names(r, up_to);
    std::vector<vertex_id> ids;
    ids.reserve(names.size());
    for (const auto& nm : names) {
        if (!t.graph.has_vertex(nm))
            throw expansion_error("ray '" + r.name + "' leaves the truncation at '" + nm +
                                      "'; expand further",
                                  t.radius + static_cast<int>(up_to) + 1);
        ids.push_back(t.graph.id_of(nm));
    }
    check_ray_edges(r, t, ids);
    return ids;
}

std::vector<vertex_id> materialize_max(const ray_spec& r, const truncation& t, std::int64_t cap) {
    std::vector<vertex_id> ids;
    std::vector<std::string> names = r.prefix;
    for (std::int64_t i = 0; i <= cap; ++i) {
        if (i >= static_cast<std::int64_t>(names.size())) {
            if (r.series.empty()) break;
            names.push_back(r.family->step(r.series, names.back()));
        }
        const std::string& nm = names[static_cast<std::size_t>(i)];
        if (!t.graph.has_vertex(nm)) break;
        ids.push_back(t.graph.id_of(nm));
    }
    check_ray_edges(r, t, ids);
    return ids;
}

ray_spec tail_of(const ray_spec& r, std::int64_t shift) {
    if (shift <= 0) return r;
    ray_spec out = r;
    out.prefix.clear();
    if (shift < static_cast<std::int64_t>(r.prefix.size())) {
        out.prefix.assign(r.prefix.begin() + shift, r.prefix.end());
    } else {
        out.prefix.push_back(materialize_names(r, shift).back());
    }
    out.name = r.name + "+" + std::to_string(shift);
    return out;
}

geodesic_ray_check is_geodesic_ray(const ray_spec& r, const truncation& t, std::int64_t horizon) {
    std::vector<vertex_id> ids = materialize(r, t, horizon);
    geodesic_ray_check res;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        // for a ray the subwalk runs R(i) -> R(j); for an anti-ray R(j) -> R(i)
        vertex_id from = ids[i];
        std::vector<ext_dist> d = r.kind == ray_kind::ray ? t.graph.dist_from(from) : t.graph.dist_to(from);
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            std::int64_t len = static_cast<std::int64_t>(j - i);
            ext_dist dd = d[static_cast<std::size_t>(ids[j])];
            vertex_id a = r.kind == ray_kind::ray ? ids[i] : ids[j];
            vertex_id b = r.kind == ray_kind::ray ? ids[j] : ids[i];
            if (dd.is_infinite() || dd.value() > len)
                throw domain_error("ray materialization inconsistent with its own edges");
            if (dd.value() < len) {
                res.geodesic = false;
                res.violation = {static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)};
                return res;
            }
            if (!t.dist_exact(a, b, dd)) res.conclusive = false;
        }
    }
    return res;
}

std::vector<ext_dist> escape_profile(const ray_spec& r, const truncation& t, std::int64_t horizon) {
    std::vector<vertex_id> ids = materialize(r, t, horizon);
    std::vector<vertex_id> base = t.base_ids();
    std::vector<ext_dist> from = t.graph.dist_from(base);
    std::vector<ext_dist> to = t.graph.dist_to(base);
    std::vector<ext_dist> out;
    out.reserve(ids.size());
    for (vertex_id v : ids)
        out.push_back(ext_dist::min(from[static_cast<std::size_t>(v)], to[static_cast<std::size_t>(v)]));
    return out;
}

extraction_result extract_geodesic_ray(const ray_spec& q, const truncation& t, vertex_id base,
                                       std::int64_t n_targets) {
    const digraph& g = t.graph;
    g.check_vertex(base);
    std::vector<vertex_id> qids = materialize_max(q, t, n_targets);
    std::vector<ext_dist> from_base = g.dist_from(base);
    std::vector<vertex_id> targets;
    for (vertex_id v : qids)
        if (from_base[static_cast<std::size_t>(v)].is_finite()) targets.push_back(v);
    if (targets.empty())
        throw domain_error("extract_geodesic_ray: base cannot reach any target of '" + q.name + "'");

    extraction_result res;
    res.targets = static_cast<std::int64_t>(targets.size());
    walk w{base};
    std::vector<vertex_id> alive = targets;
    std::unordered_map<vertex_id, std::vector<ext_dist>> from_cache;
    auto dist_from_cached = [&](vertex_id v) -> const std::vector<ext_dist>& {
        auto it = from_cache.find(v);
        if (it == from_cache.end()) it = from_cache.emplace(v, g.dist_from(v)).first;
        return it->second;
    };

    while (true) {
        vertex_id cur = w.back();
        std::int64_t dcur = static_cast<std::int64_t>(w.size()) - 1;
        vertex_id best = -1;
        std::size_t best_count = 0;
        std::vector<vertex_id> best_alive;
        // out-neighbors come sorted, so strict improvement keeps the least id
        for (vertex_id z : g.out_neighbors(cur)) {
            if (from_base[static_cast<std::size_t>(z)].is_infinite() ||
                from_base[static_cast<std::size_t>(z)].value() != dcur + 1)
                continue;
            const auto& fz = dist_from_cached(z);
            std::vector<vertex_id> still;
            for (vertex_id tgt : alive) {
                ext_dist rest = fz[static_cast<std::size_t>(tgt)];
                if (rest.is_finite() &&
                    dcur + 1 + rest.value() == from_base[static_cast<std::size_t>(tgt)].value())
                    still.push_back(tgt);
            }
            if (still.size() > best_count) {
                best = z;
                best_count = still.size();
                best_alive = std::move(still);
            }
        }
        if (best < 0) break;
        w.push_back(best);
        alive = std::move(best_alive);
        bool any_far = false;
        for (vertex_id tgt : alive)
            if (from_base[static_cast<std::size_t>(tgt)].value() > static_cast<std::int64_t>(w.size()) - 1)
                any_far = true;
        if (!any_far) break;
    }

    res.prefix = w;
    // empirical corridor: two-sided distance from the extracted walk to q
    ext_dist corridor = ext_dist::finite(0);
    for (vertex_id x : w) {
        const auto& fx = dist_from_cached(x);
        std::vector<ext_dist> tx = g.dist_to(x);
        ext_dist fwd = ext_dist::infinity(), bwd = ext_dist::infinity();
        for (vertex_id y : qids) {
            fwd = ext_dist::min(fwd, fx[static_cast<std::size_t>(y)]);
            bwd = ext_dist::min(bwd, tx[static_cast<std::size_t>(y)]);
        }
        corridor = ext_dist::max(corridor, ext_dist::max(fwd, bwd));
    }
    res.corridor = corridor;
    return res;
}

} // namespace dhg
