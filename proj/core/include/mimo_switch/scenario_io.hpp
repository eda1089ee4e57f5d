#pragma once

#include <iosfwd>
#include <string>

#include "mimo_switch/scenario.hpp"
#include "mimo_switch/switch_pattern.hpp"

namespace mimo_switch {

struct ScenarioFile {
  Scenario scenario;
  SwitchPattern pattern;
};

// JSON object with H and F as nested [re, im] pairs, q, q_cap, P_r, gamma2, sigma2,
// weights (or mse_weights / rate_weights) and a 1-based perm.
ScenarioFile parse_scenario_json(const std::string& text);
ScenarioFile load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& sc, const SwitchPattern& pat);

}  // namespace mimo_switch
