#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dhg/ext_dist.hpp"

namespace dhg {

using vertex_id = std::int32_t;

enum class side { out, in };

inline const char* side_name(side s) { return s == side::out ? "out" : "in"; }

// Finite directed multigraph with a bidirectional name table. Vertex ids are
// assigned in first-appearance order and are stable for a given input.
// Parallel edges and loops are kept in the edge list; distance queries use
// the collapsed adjacency.
class digraph {
public:
    digraph() = default;

    vertex_id add_vertex(const std::string& name);
    vertex_id ensure_vertex(const std::string& name);
    void add_edge(vertex_id src, vertex_id dst);
    void add_edge(const std::string& src, const std::string& dst);

    std::size_t vertex_count() const { return names_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    bool has_vertex(const std::string& name) const { return ids_.count(name) != 0; }
    vertex_id id_of(const std::string& name) const; // domain error if unknown
    const std::string& name_of(vertex_id v) const;
    void check_vertex(vertex_id v) const; // domain error if out of range

    const std::vector<std::pair<vertex_id, vertex_id>>& edges() const { return edges_; }
    const std::vector<vertex_id>& out_neighbors(vertex_id v) const;
    const std::vector<vertex_id>& in_neighbors(vertex_id v) const;

    std::size_t out_degree(vertex_id v) const { return out_neighbors(v).size(); }
    std::size_t in_degree(vertex_id v) const { return in_neighbors(v).size(); }

    bool has_arc(vertex_id src, vertex_id dst) const;

    // Single-source shortest path lengths (edge count), BFS.
    std::vector<ext_dist> dist_from(vertex_id src) const;
    std::vector<ext_dist> dist_to(vertex_id dst) const;
    // Multi-source variants (value = min over sources).
    std::vector<ext_dist> dist_from(const std::vector<vertex_id>& srcs) const;
    std::vector<ext_dist> dist_to(const std::vector<vertex_id>& dsts) const;

    ext_dist dist(vertex_id u, vertex_id v) const;
    ext_dist dist_sym(vertex_id u, vertex_id v) const;

    // Out-ball / in-ball of radius r around a center set, as sorted ids.
    std::vector<vertex_id> ball(const std::vector<vertex_id>& center, std::int64_t r, side s) const;

    // Greedy maximal set Y within region with dist_sym = infinity for all
    // pairs; |Y| is a lower bound on the true maximum.
    std::vector<vertex_id> independent_set_greedy(const std::vector<vertex_id>& region) const;
    std::int64_t independent_set_lower_bound(const std::vector<vertex_id>& region) const {
        return static_cast<std::int64_t>(independent_set_greedy(region).size());
    }

    std::vector<std::string> sorted_names() const;

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, vertex_id> ids_;
    std::vector<std::pair<vertex_id, vertex_id>> edges_;
    std::vector<std::vector<vertex_id>> out_; // collapsed, sorted
    std::vector<std::vector<vertex_id>> in_;  // collapsed, sorted
};

// All-pairs distances, BFS per vertex. Row u, column v = d(u, v).
class dist_matrix {
public:
    explicit dist_matrix(const digraph& g);
    ext_dist at(vertex_id u, vertex_id v) const { return rows_[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]; }
    ext_dist sym(vertex_id u, vertex_id v) const { return ext_dist::min(at(u, v), at(v, u)); }
    std::size_t size() const { return rows_.size(); }

private:
    std::vector<std::vector<ext_dist>> rows_;
};

// Edge-list format: one edge per line "SRC DST", '#' starts a comment,
// blank lines ignored; names are arbitrary non-whitespace tokens.
digraph ingest_edge_list(std::istream& text);
digraph ingest_edge_list(const std::string& text);

} // namespace dhg
