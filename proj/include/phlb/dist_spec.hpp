#pragma once

#include <json.hpp>
#include <string>

#include "phlb/phase_type.hpp"

namespace phlb {

nlohmann::json to_json(const PhaseType& ph);
PhaseType ph_from_json(const nlohmann::json& doc);

// Accepts shorthand specs ("erlang:2,3", "exp:1", "hyperexp:0.5,0.5;3,10",
// "coxian2:0.35,3,10"), inline JSON ("{...}"), or a path to a JSON document
// of the form {"alpha": [...], "T": [[...], ...]}.
PhaseType parse_dist(const std::string& spec);

}  // namespace phlb
