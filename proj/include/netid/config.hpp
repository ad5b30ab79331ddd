#pragma once

#include "netid/scenario.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace netid {

using Json = nlohmann::ordered_json;

/// Canonical serialization of a scenario; scenario_from_json round-trips it.
Json scenario_to_json(const Scenario& sc);

/// Parse and type-check a scenario document. Unknown keys and wrongly typed
/// values are rejected with a path-qualified message.
Scenario scenario_from_json(const Json& j);

Scenario load_scenario_file(const std::string& path);
void save_scenario_file(const std::string& path, const Scenario& sc);

/// Apply a "dotted.path=value" override onto a scenario document. The value
/// is parsed as JSON when possible, else taken as a string. The resulting
/// document still has to pass scenario_from_json.
void apply_override(Json& doc, const std::string& spec);

}  // namespace netid
