#include "dhg/geodesic.hpp"

#include <algorithm>
#include <deque>

#include "dhg/errors.hpp"

namespace dhg {

rational parse_rational(const std::string& s) {
    try {
        auto slash = s.find('/');
        if (slash == std::string::npos) {
            std::size_t pos = 0;
            std::int64_t n = std::stoll(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return rational(n);
        }
        std::size_t p1 = 0, p2 = 0;
        std::int64_t num = std::stoll(s.substr(0, slash), &p1);
        std::int64_t den = std::stoll(s.substr(slash + 1), &p2);
        if (p1 != slash || p2 != s.size() - slash - 1 || den == 0) throw std::invalid_argument(s);
        return rational(num, den);
    } catch (const std::exception&) {
        throw parse_error("not a rational: '" + s + "'");
    }
}

std::string rational_str(const rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

bool is_valid_walk(const digraph& g, const walk& w) {
    if (w.empty()) return false;
    for (vertex_id v : w)
        if (v < 0 || static_cast<std::size_t>(v) >= g.vertex_count()) return false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (!g.has_arc(w[i], w[i + 1])) return false;
    return true;
}

void check_walk(const digraph& g, const walk& w) {
    if (!is_valid_walk(g, w)) throw domain_error("invalid walk");
}

geodesic_dag::geodesic_dag(const digraph& g, vertex_id src) : source(src) {
    dist = g.dist_from(src);
    preds.resize(g.vertex_count());
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        if (dist[v].is_infinite()) continue;
        for (vertex_id u : g.in_neighbors(static_cast<vertex_id>(v)))
            if (dist[static_cast<std::size_t>(u)] + 1 == dist[v]) preds[v].push_back(u);
    }
}

std::uint64_t count_geodesics(const digraph& g, vertex_id u, vertex_id v, std::uint64_t saturate) {
    geodesic_dag dag(g, u);
    if (dag.dist[static_cast<std::size_t>(v)].is_infinite()) return 0;
    // DP in order of distance.
    std::vector<std::size_t> order;
    for (std::size_t w = 0; w < g.vertex_count(); ++w)
        if (dag.dist[w].is_finite() && dag.dist[w] <= dag.dist[static_cast<std::size_t>(v)]) order.push_back(w);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dag.dist[a] < dag.dist[b];
    });
    std::vector<std::uint64_t> cnt(g.vertex_count(), 0);
    cnt[static_cast<std::size_t>(u)] = 1;
    for (std::size_t w : order) {
        if (w == static_cast<std::size_t>(u)) continue;
        std::uint64_t c = 0;
        for (vertex_id p : dag.preds[w]) {
            c += cnt[static_cast<std::size_t>(p)];
            if (c >= saturate) {
                c = saturate;
                break;
            }
        }
        cnt[w] = c;
    }
    return cnt[static_cast<std::size_t>(v)];
}

geodesic_list geodesics(const digraph& g, vertex_id u, vertex_id v, std::uint64_t cap) {
    g.check_vertex(u);
    g.check_vertex(v);
    std::vector<ext_dist> da = g.dist_from(u);
    if (da[static_cast<std::size_t>(v)].is_infinite())
        throw domain_error("no directed path from " + g.name_of(u) + " to " + g.name_of(v));
    std::vector<ext_dist> db = g.dist_to(v);
    std::int64_t total = da[static_cast<std::size_t>(v)].value();

    auto on_geodesic = [&](vertex_id w) {
        return da[static_cast<std::size_t>(w)].is_finite() && db[static_cast<std::size_t>(w)].is_finite() &&
               da[static_cast<std::size_t>(w)].value() + db[static_cast<std::size_t>(w)].value() == total;
    };

    geodesic_list out;
    out.total_count = count_geodesics(g, u, v);
    walk cur{u};
    // iterative DFS over DAG successors in ascending id order
    struct frame {
        std::vector<vertex_id> nexts;
        std::size_t i = 0;
    };
    std::vector<frame> stack;
    auto successors = [&](vertex_id w) {
        frame f;
        for (vertex_id z : g.out_neighbors(w))
            if (on_geodesic(z) && da[static_cast<std::size_t>(z)] == da[static_cast<std::size_t>(w)] + 1)
                f.nexts.push_back(z);
        return f;
    };
    stack.push_back(successors(u));
    if (u == v) {
        out.walks.push_back(cur);
        return out;
    }
    while (!stack.empty()) {
        frame& f = stack.back();
        if (f.i >= f.nexts.size()) {
            stack.pop_back();
            cur.pop_back();
            continue;
        }
        vertex_id nxt = f.nexts[f.i++];
        cur.push_back(nxt);
        if (nxt == v && walk_length(cur) == total) {
            out.walks.push_back(cur);
            if (out.walks.size() >= cap) {
                out.exhausted = out.walks.size() >= out.total_count;
                return out;
            }
            cur.pop_back();
        } else {
            stack.push_back(successors(nxt));
        }
    }
    out.exhausted = true;
    return out;
}

qg_result is_quasi_geodesic(const digraph& g, const walk& w, const rational& gamma, const rational& c) {
    check_walk(g, w);
    if (gamma < rational(1) || c < rational(0))
        throw precondition_error("quasi-geodesic constants need gamma >= 1, c >= 0");
    std::unordered_map<vertex_id, std::vector<ext_dist>> from;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        if (!from.count(w[i])) from.emplace(w[i], g.dist_from(w[i]));
        for (std::size_t j = i + 1; j < w.size(); ++j) {
            std::int64_t len = static_cast<std::int64_t>(j - i);
            ext_dist d = from.at(w[i])[static_cast<std::size_t>(w[j])];
            if (d.is_infinite()) continue; // gamma*inf + c dominates any length
            if (rational(len) > gamma * rational(d.value()) + c)
                return {false, {static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)}, d};
        }
    }
    return {true, {-1, -1}, ext_dist::finite(0)};
}

ext_dist stability_kappa(const digraph& g, const walk& p, const walk& q) {
    check_walk(g, p);
    check_walk(g, q);
    if (p.front() != q.front() || p.back() != q.back())
        throw domain_error("stability_kappa: walks are not parallel");
    ext_dist kappa = ext_dist::finite(0);
    for (vertex_id x : p) {
        std::vector<ext_dist> fromx = g.dist_from(x);
        std::vector<ext_dist> tox = g.dist_to(x);
        ext_dist in_ball = ext_dist::infinity();  // x within B+(Q): min d(qv, x)
        ext_dist out_ball = ext_dist::infinity(); // x within B-(Q): min d(x, qv)
        for (vertex_id y : q) {
            in_ball = ext_dist::min(in_ball, tox[static_cast<std::size_t>(y)]);
            out_ball = ext_dist::min(out_ball, fromx[static_cast<std::size_t>(y)]);
        }
        kappa = ext_dist::max(kappa, ext_dist::max(in_ball, out_ball));
    }
    return kappa;
}

namespace {

bool rational_leq_dist(const rational& lhs, ext_dist d) {
    // lhs <= d where d may be infinite
    if (d.is_infinite()) return true;
    return lhs <= rational(d.value());
}

} // namespace

qi_report qi_check(const digraph& g1, const digraph& g2, const qi_spec& spec) {
    if (spec.gamma < rational(1) || spec.c < rational(0))
        throw precondition_error("qi spec needs gamma >= 1, c >= 0");
    for (std::size_t x = 0; x < g1.vertex_count(); ++x)
        if (!spec.map.count(static_cast<vertex_id>(x)))
            throw domain_error("qi map does not cover vertex " + g1.name_of(static_cast<vertex_id>(x)));
    for (const auto& [x, y] : spec.map) {
        g1.check_vertex(x);
        g2.check_vertex(y);
    }

    dist_matrix m1(g1), m2(g2);
    qi_report rep;
    auto fx = [&](vertex_id x) { return spec.map.at(x); };

    for (std::size_t a = 0; a < g1.vertex_count(); ++a) {
        for (std::size_t b = 0; b < g1.vertex_count(); ++b) {
            ++rep.checked_pairs;
            vertex_id x = static_cast<vertex_id>(a), y = static_cast<vertex_id>(b);
            ext_dist d1 = m1.at(x, y);
            ext_dist d2 = m2.at(fx(x), fx(y));
            // upper: d2 <= gamma*d1 + c
            if (d1.is_finite()) {
                rational hi = spec.gamma * rational(d1.value()) + spec.c;
                if (d2.is_infinite() || rational(d2.value()) > hi)
                    rep.violations.push_back({"upper", g1.name_of(x), g1.name_of(y),
                                              "d2=" + d2.str() + " > gamma*" + d1.str() + "+c"});
            }
            // lower: d1/gamma - c <= d2
            if (d1.is_infinite()) {
                if (d2.is_finite())
                    rep.violations.push_back({"lower", g1.name_of(x), g1.name_of(y),
                                              "d1=inf but d2=" + d2.str()});
            } else {
                rational lo = rational(d1.value()) / spec.gamma - spec.c;
                if (!rational_leq_dist(lo, d2))
                    rep.violations.push_back({"lower", g1.name_of(x), g1.name_of(y),
                                              "d2=" + d2.str() + " < " + rational_str(lo)});
            }
        }
    }
    // c-co-density over g2
    auto within_c = [&](ext_dist d) { return d.is_finite() && rational(d.value()) <= spec.c; };
    for (std::size_t yv = 0; yv < g2.vertex_count(); ++yv) {
        ++rep.checked_codensity;
        vertex_id y = static_cast<vertex_id>(yv);
        bool covered = false;
        for (std::size_t a = 0; a < g1.vertex_count() && !covered; ++a) {
            vertex_id img = fx(static_cast<vertex_id>(a));
            covered = within_c(m2.at(img, y)) && within_c(m2.at(y, img));
        }
        if (!covered)
            rep.violations.push_back({"codensity", "", g2.name_of(y),
                                      "no image vertex within c in both directions"});
    }
    return rep;
}

} // namespace dhg
