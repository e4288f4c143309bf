#include "dhg/ends.hpp"

#include <unordered_map>

#include "dhg/errors.hpp"

namespace dhg {

refinement_result refinement_map(const classification& boundary_classes,
                                 const classification& end_classes) {
    std::unordered_map<std::string, int> end_of_ray;
    for (std::size_t e = 0; e < end_classes.classes.size(); ++e)
        for (const auto& rep : end_classes.classes[e].representatives)
            end_of_ray[rep.canonical_key()] = static_cast<int>(e);

    refinement_result res;
    res.report.lemma = "boundary-refines-ends";
    for (std::size_t b = 0; b < boundary_classes.classes.size(); ++b) {
        int target = -1;
        bool straddles = false;
        for (const auto& rep : boundary_classes.classes[b].representatives) {
            auto it = end_of_ray.find(rep.canonical_key());
            if (it == end_of_ray.end())
                throw domain_error("representative '" + rep.name + "' missing from the end classification");
            if (target < 0)
                target = it->second;
            else if (target != it->second)
                straddles = true;
        }
        ++res.report.checked;
        if (straddles) {
            res.report.add_violation({{"boundary_class", static_cast<int>(b)},
                                      {"detail", "representatives fall into distinct end classes"}});
        }
        res.map.push_back(target);
    }
    return res;
}

} // namespace dhg
