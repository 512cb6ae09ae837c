#pragma once

#include <string>

#include "hotrack/scenario.hpp"

namespace hotrack {

// Scenario files are JSON with fixed sections; unknown keys anywhere are
// rejected. Loading applies documented defaults, runs full validation, and
// audits the declared leader-input derivative bound and Lipschitz constants
// with a fixed-seed sampler. Throws ParseError (malformed JSON, with the line)
// or ValidationError (every violation collected).
Scenario load_scenario(const std::string& path);

// Inverse of load_scenario up to defaults: writing and re-reading yields an
// identical scenario. Custom nonlinearities cannot be serialized.
std::string scenario_to_json(const Scenario& sc);
void save_scenario(const Scenario& sc, const std::string& path);

}  // namespace hotrack
