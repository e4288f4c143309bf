#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dhg/digraph.hpp"
#include "dhg/geodesic.hpp"

namespace dhg {

using json = nlohmann::json;

// Per-audit pass/fail record with the extremal witness achieving the bound.
struct audit_report {
    std::string lemma;
    std::int64_t checked = 0;
    std::int64_t skipped = 0; // entries excluded (e.g. unstabilized estimates)
    json violations = json::array();
    json extremal;

    bool passed() const { return violations.empty(); }
    void add_violation(json v, std::size_t keep = 100) {
        if (violations.size() < keep) violations.push_back(std::move(v));
        ++violation_count;
    }
    std::int64_t violation_count = 0;
    json to_json() const;
};

// Canonical digraph JSON: sorted vertices, lexicographic edges.
json digraph_to_json(const digraph& g);
digraph digraph_from_json(const json& j);

json walk_to_json(const digraph& g, const walk& w);
walk walk_from_json(const digraph& g, const json& j);

json ext_to_json(ext_dist d);

qi_spec qi_spec_from_json(const digraph& g1, const digraph& g2, const json& j);

// FNV-1a over bytes, hex string; used for input hashes in run manifests.
std::string fnv1a_hex(const std::string& bytes);

// Every report embeds its manifest; identical manifests must produce
// byte-identical reports.
const char* version_string();

// Bounded worker pool size: DHG_WORKERS when set (clamped to [1, 64]),
// otherwise 1. All parallel paths aggregate deterministically.
int worker_count();

struct run_manifest {
    std::string command;
    json inputs = json::object(); // name -> content hash
    json params = json::object();
    json to_json() const;
};

} // namespace dhg
