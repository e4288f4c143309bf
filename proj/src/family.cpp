#include "dhg/family.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "dhg/errors.hpp"

namespace dhg {

const ray_decl& generated_family::ray_by_name(const std::string& rname) const {
    for (const auto& r : rays)
        if (r.name == rname) return r;
    throw usage_error("family '" + name + "' has no builtin ray '" + rname + "'");
}

std::string generated_family::step(const std::string& series_name, const std::string& v) const {
    auto it = series.find(series_name);
    if (it == series.end())
        throw usage_error("family '" + name + "' has no series '" + series_name + "'");
    return it->second(v);
}

namespace {

void check_token(const std::string& fam, const std::string& tok) {
    if (tok.empty()) throw domain_error("generation error in family '" + fam + "': empty vertex id");
    for (char c : tok)
        if (std::isspace(static_cast<unsigned char>(c)))
            throw domain_error("generation error in family '" + fam + "': malformed vertex id '" + tok + "'");
}

// "<series char><index>" names, e.g. "v12".
long series_index(const std::string& fam, const std::string& v, std::size_t skip) {
    try {
        std::size_t pos = 0;
        long i = std::stol(v.substr(skip), &pos);
        if (pos != v.size() - skip) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw domain_error("generation error in family '" + fam + "': malformed vertex id '" + v + "'");
    }
}

std::string idx(const char* s, long i) { return s + std::to_string(i); }

// --- ex-topbound: series u,v,w,x,y; v-chain forward, x-chain backward ---

family_ptr make_ex_topbound() {
    auto f = std::make_shared<generated_family>();
    f->name = "ex-topbound";
    auto bad = [](const std::string& v) {
        throw domain_error("generation error in family 'ex-topbound': unknown vertex '" + v + "'");
    };
    f->out_rule = [bad](const std::string& v) -> std::vector<std::string> {
        long i = series_index("ex-topbound", v, 1);
        switch (v[0]) {
            case 'u': return {idx("v", i)};
            case 'v': return {idx("w", i), idx("v", i + 1)};
            case 'w': return {idx("x", i)};
            case 'x': return i > 0 ? std::vector<std::string>{idx("y", i), idx("x", i - 1)}
                                   : std::vector<std::string>{"y0"};
            case 'y': return {};
            default: bad(v); return {};
        }
    };
    f->in_rule = [bad](const std::string& v) -> std::vector<std::string> {
        long i = series_index("ex-topbound", v, 1);
        switch (v[0]) {
            case 'u': return {};
            case 'v': return i > 0 ? std::vector<std::string>{idx("u", i), idx("v", i - 1)}
                                   : std::vector<std::string>{"u0"};
            case 'w': return {idx("v", i)};
            case 'x': return {idx("w", i), idx("x", i + 1)};
            case 'y': return {idx("x", i)};
            default: bad(v); return {};
        }
    };
    f->origin = {"v0", "x0"};
    f->base_for_radius = [](int) { return std::vector<std::string>{"v0", "x0"}; };
    f->series["v"] = [](const std::string& v) { return idx("v", series_index("ex-topbound", v, 1) + 1); };
    f->series["x"] = [](const std::string& v) { return idx("x", series_index("ex-topbound", v, 1) + 1); };
    f->rays = {
        {"v-ray", ray_kind::ray, {"v0"}, "v"},
        {"x-antiray", ray_kind::anti_ray, {"x0"}, "x"},
    };
    return f;
}

// --- ex-dist0: ray x0 x1 ..., anti-rays on y and z, edges x_i -> y_i, z_i ---

family_ptr make_ex_dist0() {
    auto f = std::make_shared<generated_family>();
    f->name = "ex-dist0";
    auto bad = [](const std::string& v) {
        throw domain_error("generation error in family 'ex-dist0': unknown vertex '" + v + "'");
    };
    f->out_rule = [bad](const std::string& v) -> std::vector<std::string> {
        long i = series_index("ex-dist0", v, 1);
        switch (v[0]) {
            case 'x': return {idx("x", i + 1), idx("y", i), idx("z", i)};
            case 'y': return i > 0 ? std::vector<std::string>{idx("y", i - 1)} : std::vector<std::string>{};
            case 'z': return i > 0 ? std::vector<std::string>{idx("z", i - 1)} : std::vector<std::string>{};
            default: bad(v); return {};
        }
    };
    f->in_rule = [bad](const std::string& v) -> std::vector<std::string> {
        long i = series_index("ex-dist0", v, 1);
        switch (v[0]) {
            case 'x': return i > 0 ? std::vector<std::string>{idx("x", i - 1)} : std::vector<std::string>{};
            case 'y': return {idx("x", i), idx("y", i + 1)};
            case 'z': return {idx("x", i), idx("z", i + 1)};
            default: bad(v); return {};
        }
    };
    f->origin = {"x0"};
    f->base_for_radius = [](int) { return std::vector<std::string>{"x0"}; };
    f->series["x"] = [](const std::string& v) { return idx("x", series_index("ex-dist0", v, 1) + 1); };
    f->series["y"] = [](const std::string& v) { return idx("y", series_index("ex-dist0", v, 1) + 1); };
    f->series["z"] = [](const std::string& v) { return idx("z", series_index("ex-dist0", v, 1) + 1); };
    f->rays = {
        {"x-ray", ray_kind::ray, {"x0"}, "x"},
        {"y-antiray", ray_kind::anti_ray, {"y0"}, "y"},
        {"z-antiray", ray_kind::anti_ray, {"z0"}, "z"},
    };
    return f;
}

// --- nat / int: Cayley digraphs of (N,+1) and (Z,{+1,-1}) ---

long int_name(const std::string& fam, const std::string& v) {
    try {
        std::size_t pos = 0;
        long i = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw domain_error("generation error in family '" + fam + "': malformed vertex id '" + v + "'");
    }
}

family_ptr make_nat() {
    auto f = std::make_shared<generated_family>();
    f->name = "nat";
    f->out_rule = [](const std::string& v) -> std::vector<std::string> {
        long n = int_name("nat", v);
        if (n < 0) throw domain_error("generation error in family 'nat': negative vertex '" + v + "'");
        return {std::to_string(n + 1)};
    };
    f->in_rule = [](const std::string& v) -> std::vector<std::string> {
        long n = int_name("nat", v);
        return n > 0 ? std::vector<std::string>{std::to_string(n - 1)} : std::vector<std::string>{};
    };
    f->origin = {"0"};
    f->base_for_radius = [](int) { return std::vector<std::string>{"0"}; };
    f->series["+1"] = [](const std::string& v) { return std::to_string(int_name("nat", v) + 1); };
    f->rays = {{"nat-ray", ray_kind::ray, {"0"}, "+1"}};
    return f;
}

family_ptr make_int() {
    auto f = std::make_shared<generated_family>();
    f->name = "int";
    f->out_rule = [](const std::string& v) -> std::vector<std::string> {
        long n = int_name("int", v);
        return {std::to_string(n + 1), std::to_string(n - 1)};
    };
    f->in_rule = [](const std::string& v) -> std::vector<std::string> {
        long n = int_name("int", v);
        return {std::to_string(n - 1), std::to_string(n + 1)};
    };
    f->origin = {"0"};
    f->base_for_radius = [](int) { return std::vector<std::string>{"0"}; };
    f->series["+1"] = [](const std::string& v) { return std::to_string(int_name("int", v) + 1); };
    f->series["-1"] = [](const std::string& v) { return std::to_string(int_name("int", v) - 1); };
    f->rays = {
        {"plus-ray", ray_kind::ray, {"0"}, "+1"},
        {"minus-antiray", ray_kind::anti_ray, {"0"}, "-1"},
    };
    return f;
}

// --- monoid-ab: <a,b | a^2 = b^2, ab = ba> via normal forms a^k and b.a^k ---
//
// Every element is a^k or b.a^k; right multiplication:
//   a^k * a = a^(k+1)        a^k * b = b.a^k
//   b.a^k * a = b.a^(k+1)    b.a^k * b = a^(k+2)
// Names: "e", "a", "a^k" (k >= 2); "b", "b.a^k" (k >= 1).

struct ab_elem {
    bool bside;
    long k;
};

ab_elem parse_ab(const std::string& v) {
    if (v == "e") return {false, 0};
    if (v == "a") return {false, 1};
    if (v == "b") return {true, 0};
    if (v.rfind("a^", 0) == 0) return {false, series_index("monoid-ab", v, 2)};
    if (v.rfind("b.a^", 0) == 0) return {true, series_index("monoid-ab", v, 4)};
    throw domain_error("generation error in family 'monoid-ab': unknown vertex '" + v + "'");
}

std::string ab_name(bool bside, long k) {
    if (!bside) {
        if (k == 0) return "e";
        if (k == 1) return "a";
        return "a^" + std::to_string(k);
    }
    if (k == 0) return "b";
    return "b.a^" + std::to_string(k);
}

family_ptr make_monoid_ab() {
    auto f = std::make_shared<generated_family>();
    f->name = "monoid-ab";
    f->out_rule = [](const std::string& v) -> std::vector<std::string> {
        ab_elem e = parse_ab(v);
        if (!e.bside) return {ab_name(false, e.k + 1), ab_name(true, e.k)};
        return {ab_name(true, e.k + 1), ab_name(false, e.k + 2)};
    };
    f->in_rule = [](const std::string& v) -> std::vector<std::string> {
        ab_elem e = parse_ab(v);
        std::vector<std::string> res;
        if (!e.bside) {
            if (e.k >= 1) res.push_back(ab_name(false, e.k - 1)); // * a
            if (e.k >= 2) res.push_back(ab_name(true, e.k - 2));  // * b
        } else {
            if (e.k >= 1) res.push_back(ab_name(true, e.k - 1)); // * a
            res.push_back(ab_name(false, e.k));                  // * b
        }
        return res;
    };
    f->origin = {"e"};
    f->base_for_radius = [](int) { return std::vector<std::string>{"e"}; };
    f->series["a"] = [](const std::string& v) {
        ab_elem e = parse_ab(v);
        return ab_name(e.bside, e.k + 1);
    };
    f->rays = {
        {"a-ray", ray_kind::ray, {"e"}, "a"},
        {"b-ray", ray_kind::ray, {"b"}, "a"},
    };
    return f;
}

// --- oriented-tree3: 3-regular tree, double ray r<i> oriented forward,
// edges r<i> -> t<i> into subtrees, subtree edges doubled both ways ---

bool tree_is_ray(const std::string& v) { return v[0] == 'r'; }

std::string tree_parent(const std::string& v) {
    // "t<i>.<bits>" -> drop last bit; "t<i>.b" -> "t<i>"
    std::string p = v.substr(0, v.size() - 1);
    if (!p.empty() && p.back() == '.') p.pop_back();
    return p;
}

bool tree_is_root(const std::string& v) { return v.find('.') == std::string::npos; }

std::vector<std::string> tree_children(const std::string& v) {
    if (tree_is_root(v)) return {v + ".0", v + ".1"};
    return {v + "0", v + "1"};
}

family_ptr make_oriented_tree3() {
    auto f = std::make_shared<generated_family>();
    f->name = "oriented-tree3";
    f->out_rule = [](const std::string& v) -> std::vector<std::string> {
        if (tree_is_ray(v)) {
            long i = series_index("oriented-tree3", v, 1);
            return {idx("r", i + 1), idx("t", i)};
        }
        std::vector<std::string> res = tree_children(v);
        if (!tree_is_root(v)) res.push_back(tree_parent(v));
        return res;
    };
    f->in_rule = [](const std::string& v) -> std::vector<std::string> {
        if (tree_is_ray(v)) {
            long i = series_index("oriented-tree3", v, 1);
            return {idx("r", i - 1)};
        }
        std::vector<std::string> res = tree_children(v);
        if (tree_is_root(v))
            res.push_back(idx("r", series_index("oriented-tree3", v, 1)));
        else
            res.push_back(tree_parent(v));
        return res;
    };
    f->origin = {"r0"};
    // No radius-uniform finite base exists; the leftmost ray vertex of the
    // truncation covers everything at that scale.
    f->base_for_radius = [](int radius) { return std::vector<std::string>{idx("r", -static_cast<long>(radius))}; };
    f->series["r+"] = [](const std::string& v) { return idx("r", series_index("oriented-tree3", v, 1) + 1); };
    f->series["r-"] = [](const std::string& v) { return idx("r", series_index("oriented-tree3", v, 1) - 1); };
    f->rays = {
        {"r-ray", ray_kind::ray, {"r0"}, "r+"},
        {"r-antiray", ray_kind::anti_ray, {"r0"}, "r-"},
    };
    return f;
}

const std::vector<std::pair<std::string, family_ptr (*)()>>& registry() {
    static const std::vector<std::pair<std::string, family_ptr (*)()>> reg = {
        {"ex-topbound", make_ex_topbound}, {"ex-dist0", make_ex_dist0},
        {"nat", make_nat},                 {"int", make_int},
        {"monoid-ab", make_monoid_ab},     {"oriented-tree3", make_oriented_tree3},
    };
    return reg;
}

} // namespace

const std::vector<std::string>& family_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [n, _] : registry()) out.push_back(n);
        return out;
    }();
    return names;
}

family_ptr get_family(const std::string& name) {
    static std::unordered_map<std::string, family_ptr> cache;
    auto it = cache.find(name);
    if (it != cache.end()) return it->second;
    for (const auto& [n, make] : registry()) {
        if (n == name) {
            family_ptr f = make();
            cache.emplace(name, f);
            return f;
        }
    }
    throw usage_error("unknown family: " + name);
}

bool truncation::dist_exact(vertex_id u, vertex_id v, ext_dist d) const {
    ext_dist escape = to_frontier[static_cast<std::size_t>(u)] + from_frontier[static_cast<std::size_t>(v)] + 2;
    return d <= escape || (d.is_infinite() && escape.is_infinite());
}

std::vector<vertex_id> truncation::base_ids() const {
    std::vector<vertex_id> ids;
    for (const auto& name : family->base_for_radius(radius)) ids.push_back(graph.id_of(name));
    return ids;
}

std::vector<vertex_id> truncation::origin_ids() const {
    std::vector<vertex_id> ids;
    for (const auto& name : family->origin) ids.push_back(graph.id_of(name));
    return ids;
}

truncation expand(family_ptr f, int radius) { return expand(f, radius, f->origin); }

truncation expand(family_ptr f, int radius, const std::vector<std::string>& start) {
    if (radius < 0) throw precondition_error("expand: radius must be nonnegative");
    truncation t;
    t.family = f;
    t.radius = radius;

    std::vector<std::string> order;
    std::unordered_map<std::string, int> lvl;
    std::deque<std::string> cur;
    for (const auto& s : start) {
        check_token(f->name, s);
        if (!lvl.count(s)) {
            lvl.emplace(s, 0);
            order.push_back(s);
            cur.push_back(s);
        }
    }
    for (int step = 1; step <= radius && !cur.empty(); ++step) {
        std::deque<std::string> next;
        for (const auto& v : cur) {
            auto visit = [&](const std::vector<std::string>& ns) {
                for (const auto& w : ns) {
                    check_token(f->name, w);
                    if (!lvl.count(w)) {
                        lvl.emplace(w, step);
                        order.push_back(w);
                        next.push_back(w);
                    }
                }
            };
            visit(f->out_rule(v));
            visit(f->in_rule(v));
        }
        cur = std::move(next);
    }

    for (const auto& name : order) t.graph.add_vertex(name);
    t.level.resize(order.size());
    for (const auto& name : order) {
        vertex_id v = t.graph.id_of(name);
        t.level[static_cast<std::size_t>(v)] = lvl[name];
    }
    for (const auto& name : order) {
        vertex_id v = t.graph.id_of(name);
        for (const auto& w : f->out_rule(name)) {
            check_token(f->name, w);
            if (t.graph.has_vertex(w)) t.graph.add_edge(v, t.graph.id_of(w));
        }
    }
    for (std::size_t v = 0; v < order.size(); ++v)
        if (t.level[v] == radius) t.frontier.push_back(static_cast<vertex_id>(v));
    t.to_frontier = t.graph.dist_to(t.frontier);
    t.from_frontier = t.graph.dist_from(t.frontier);
    return t;
}

} // namespace dhg
