#pragma once

#include <stdexcept>
#include <string>

namespace dhg {

// Error taxonomy shared by the library and the CLI exit-code mapping:
//   usage/parse/domain/precondition/parameter -> exit 2
//   capacity/expansion                        -> exit 3
enum class errkind {
    usage,
    parse,
    domain,
    precondition,
    parameter,
    capacity,
    expansion,
};

class error : public std::runtime_error {
public:
    error(errkind k, std::string msg) : std::runtime_error(std::move(msg)), kind_(k) {}
    errkind kind() const noexcept { return kind_; }

    // Expansion errors may carry the truncation radius that would be needed.
    int suggested_radius = -1;

private:
    errkind kind_;
};

inline error parse_error(std::string msg) { return error(errkind::parse, std::move(msg)); }
inline error domain_error(std::string msg) { return error(errkind::domain, std::move(msg)); }
inline error precondition_error(std::string msg) { return error(errkind::precondition, std::move(msg)); }
inline error parameter_error(std::string msg) { return error(errkind::parameter, std::move(msg)); }
inline error capacity_error(std::string msg) { return error(errkind::capacity, std::move(msg)); }
inline error usage_error(std::string msg) { return error(errkind::usage, std::move(msg)); }

inline error expansion_error(std::string msg, int needed_radius) {
    error e(errkind::expansion, std::move(msg));
    e.suggested_radius = needed_radius;
    return e;
}

} // namespace dhg
