#pragma once

#include "dhg/boundary.hpp"

namespace dhg {

struct refinement_result {
    // boundary class index -> end class index
    std::vector<int> map;
    audit_report report;
};

// Maps each boundary class to the end class containing its representatives.
// A boundary class straddling two end classes is a violation (resolution too
// coarse or a bug); a representative missing from the end classification is
// a domain error.
refinement_result refinement_map(const classification& boundary_classes,
                                 const classification& end_classes);

} // namespace dhg
