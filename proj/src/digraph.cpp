#include "dhg/digraph.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <sstream>

#include "dhg/errors.hpp"

namespace dhg {

vertex_id digraph::add_vertex(const std::string& name) {
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    vertex_id id = static_cast<vertex_id>(names_.size());
    names_.push_back(name);
    ids_.emplace(name, id);
    out_.emplace_back();
    in_.emplace_back();
    return id;
}

vertex_id digraph::ensure_vertex(const std::string& name) { return add_vertex(name); }

void digraph::add_edge(vertex_id src, vertex_id dst) {
    check_vertex(src);
    check_vertex(dst);
    edges_.emplace_back(src, dst);
    auto& o = out_[static_cast<std::size_t>(src)];
    auto lo = std::lower_bound(o.begin(), o.end(), dst);
    if (lo == o.end() || *lo != dst) o.insert(lo, dst);
    auto& i = in_[static_cast<std::size_t>(dst)];
    auto li = std::lower_bound(i.begin(), i.end(), src);
    if (li == i.end() || *li != src) i.insert(li, src);
}

void digraph::add_edge(const std::string& src, const std::string& dst) {
    vertex_id s = ensure_vertex(src);
    vertex_id d = ensure_vertex(dst);
    add_edge(s, d);
}

vertex_id digraph::id_of(const std::string& name) const {
    auto it = ids_.find(name);
    if (it == ids_.end()) throw domain_error("unknown vertex: " + name);
    return it->second;
}

const std::string& digraph::name_of(vertex_id v) const {
    check_vertex(v);
    return names_[static_cast<std::size_t>(v)];
}

void digraph::check_vertex(vertex_id v) const {
    if (v < 0 || static_cast<std::size_t>(v) >= names_.size())
        throw domain_error("vertex id out of range: " + std::to_string(v));
}

const std::vector<vertex_id>& digraph::out_neighbors(vertex_id v) const {
    check_vertex(v);
    return out_[static_cast<std::size_t>(v)];
}

const std::vector<vertex_id>& digraph::in_neighbors(vertex_id v) const {
    check_vertex(v);
    return in_[static_cast<std::size_t>(v)];
}

bool digraph::has_arc(vertex_id src, vertex_id dst) const {
    const auto& o = out_neighbors(src);
    return std::binary_search(o.begin(), o.end(), dst);
}

namespace {

std::vector<ext_dist> bfs(const std::vector<std::vector<vertex_id>>& adj,
                          std::size_t n, const std::vector<vertex_id>& srcs) {
    std::vector<ext_dist> d(n, ext_dist::infinity());
    std::deque<vertex_id> q;
    for (vertex_id s : srcs) {
        if (d[static_cast<std::size_t>(s)].is_infinite()) {
            d[static_cast<std::size_t>(s)] = ext_dist::finite(0);
            q.push_back(s);
        }
    }
    while (!q.empty()) {
        vertex_id u = q.front();
        q.pop_front();
        std::int64_t du = d[static_cast<std::size_t>(u)].value();
        for (vertex_id w : adj[static_cast<std::size_t>(u)]) {
            auto& dw = d[static_cast<std::size_t>(w)];
            if (dw.is_infinite()) {
                dw = ext_dist::finite(du + 1);
                q.push_back(w);
            }
        }
    }
    return d;
}

} // namespace

std::vector<ext_dist> digraph::dist_from(vertex_id src) const {
    check_vertex(src);
    return bfs(out_, names_.size(), {src});
}

std::vector<ext_dist> digraph::dist_to(vertex_id dst) const {
    check_vertex(dst);
    return bfs(in_, names_.size(), {dst});
}

std::vector<ext_dist> digraph::dist_from(const std::vector<vertex_id>& srcs) const {
    for (vertex_id s : srcs) check_vertex(s);
    return bfs(out_, names_.size(), srcs);
}

std::vector<ext_dist> digraph::dist_to(const std::vector<vertex_id>& dsts) const {
    for (vertex_id s : dsts) check_vertex(s);
    return bfs(in_, names_.size(), dsts);
}

ext_dist digraph::dist(vertex_id u, vertex_id v) const {
    check_vertex(u);
    check_vertex(v);
    if (u == v) return ext_dist::finite(0);
    return dist_from(u)[static_cast<std::size_t>(v)];
}

ext_dist digraph::dist_sym(vertex_id u, vertex_id v) const {
    return ext_dist::min(dist(u, v), dist(v, u));
}

std::vector<vertex_id> digraph::ball(const std::vector<vertex_id>& center, std::int64_t r, side s) const {
    std::vector<ext_dist> d = s == side::out ? dist_from(center) : dist_to(center);
    std::vector<vertex_id> res;
    for (std::size_t v = 0; v < d.size(); ++v)
        if (d[v] <= r) res.push_back(static_cast<vertex_id>(v));
    return res;
}

std::vector<vertex_id> digraph::independent_set_greedy(const std::vector<vertex_id>& region) const {
    std::vector<vertex_id> sorted = region;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<vertex_id> chosen;
    std::vector<std::vector<ext_dist>> from_chosen;
    std::vector<std::vector<ext_dist>> to_chosen;
    for (vertex_id v : sorted) {
        bool ok = true;
        for (std::size_t i = 0; i < chosen.size(); ++i) {
            if (from_chosen[i][static_cast<std::size_t>(v)].is_finite() ||
                to_chosen[i][static_cast<std::size_t>(v)].is_finite()) {
                ok = false;
                break;
            }
        }
        if (ok) {
            chosen.push_back(v);
            from_chosen.push_back(dist_from(v));
            to_chosen.push_back(dist_to(v));
        }
    }
    return chosen;
}

std::vector<std::string> digraph::sorted_names() const {
    std::vector<std::string> ns = names_;
    std::sort(ns.begin(), ns.end());
    return ns;
}

dist_matrix::dist_matrix(const digraph& g) {
    rows_.reserve(g.vertex_count());
    for (std::size_t u = 0; u < g.vertex_count(); ++u)
        rows_.push_back(g.dist_from(static_cast<vertex_id>(u)));
}

digraph ingest_edge_list(std::istream& text) {
    digraph g;
    std::string line;
    int lineno = 0;
    while (std::getline(text, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string src, dst, extra;
        if (!(ls >> src)) continue; // blank
        if (!(ls >> dst) || (ls >> extra))
            throw parse_error("line " + std::to_string(lineno) + ": expected 'SRC DST'");
        g.add_edge(src, dst);
    }
    return g;
}

digraph ingest_edge_list(const std::string& text) {
    std::istringstream is(text);
    return ingest_edge_list(is);
}

} // namespace dhg
