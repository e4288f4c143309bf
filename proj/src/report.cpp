#include "dhg/report.hpp"

#include <algorithm>

#include "dhg/errors.hpp"

namespace dhg {

const char* version_string() { return "dhg 0.1.0"; }

int worker_count() {
    const char* env = std::getenv("DHG_WORKERS");
    if (!env) return 1;
    int n = std::atoi(env);
    if (n < 1) return 1;
    if (n > 64) return 64;
    return n;
}

json audit_report::to_json() const {
    json j;
    j["lemma"] = lemma;
    j["checked"] = checked;
    if (skipped > 0) j["skipped"] = skipped;
    j["violations"] = violations;
    j["violation_count"] = violation_count;
    j["passed"] = passed();
    if (!extremal.is_null()) j["extremal"] = extremal;
    return j;
}

json digraph_to_json(const digraph& g) {
    json j;
    j["vertices"] = g.sorted_names();
    std::vector<std::pair<std::string, std::string>> es;
    es.reserve(g.edge_count());
    for (const auto& [s, d] : g.edges()) es.emplace_back(g.name_of(s), g.name_of(d));
    std::sort(es.begin(), es.end());
    json edges = json::array();
    for (const auto& [s, d] : es) edges.push_back(json::array({s, d}));
    j["edges"] = edges;
    return j;
}

digraph digraph_from_json(const json& j) {
    if (!j.is_object() || !j.contains("vertices") || !j.contains("edges"))
        throw parse_error("digraph json needs 'vertices' and 'edges'");
    digraph g;
    for (const auto& v : j["vertices"]) g.add_vertex(v.get<std::string>());
    for (const auto& e : j["edges"]) {
        if (!e.is_array() || e.size() != 2) throw parse_error("edge entries must be [src, dst]");
        g.add_edge(e[0].get<std::string>(), e[1].get<std::string>());
    }
    return g;
}

json walk_to_json(const digraph& g, const walk& w) {
    json a = json::array();
    for (vertex_id v : w) a.push_back(g.name_of(v));
    return a;
}

walk walk_from_json(const digraph& g, const json& j) {
    walk w;
    for (const auto& v : j) w.push_back(g.id_of(v.get<std::string>()));
    return w;
}

json ext_to_json(ext_dist d) {
    if (d.is_infinite()) return json("inf");
    return json(d.value());
}

qi_spec qi_spec_from_json(const digraph& g1, const digraph& g2, const json& j) {
    qi_spec spec;
    if (!j.contains("map")) throw parse_error("qi spec needs 'map'");
    for (const auto& [k, v] : j["map"].items())
        spec.map[g1.id_of(k)] = g2.id_of(v.get<std::string>());
    if (j.contains("gamma")) spec.gamma = parse_rational(j["gamma"].is_string() ? j["gamma"].get<std::string>() : j["gamma"].dump());
    if (j.contains("c")) spec.c = parse_rational(j["c"].is_string() ? j["c"].get<std::string>() : j["c"].dump());
    return spec;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

json run_manifest::to_json() const {
    json j;
    j["command"] = command;
    j["inputs"] = inputs;
    j["params"] = params;
    j["toolVersion"] = version_string();
    return j;
}

} // namespace dhg
