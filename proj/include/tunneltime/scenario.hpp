#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace tunneltime {

/// Exit categories of the scenario runner.
enum class RunStatus : int {
  ok = 0,
  usage_error = 2,    // unknown scenario, malformed config/overrides
  physics_error = 3,  // precondition rejected by a physics module
};

/// Named scenario plus resolved parameters (defaults merged with overrides).
struct ScenarioConfig {
  std::string scenario;
  nlohmann::json params;  // resolved dimensionless parameters
  std::filesystem::path out_dir = "out";
  bool quiet = false;
};

/// Default parameter set of a scenario. Throws std::invalid_argument for
/// unknown names. Known scenarios: fig1, eta-scan, sumrule, causality,
/// weakdemo, free-check.
nlohmann::json scenario_defaults(const std::string& name);
std::vector<std::string> scenario_names();

/// Build a config from a scenario name, optional JSON file and repeated
/// key=value overrides (dotted keys address nested fields).
ScenarioConfig make_config(const std::string& scenario, const std::string& config_path,
                           const std::vector<std::string>& overrides,
                           const std::string& out_dir, bool quiet);

/// FNV-1a 64 hash of the canonical config serialization, as fixed-width hex.
std::string config_hash(const ScenarioConfig& config);

/// Run the scenario: writes CSV tables, summary.json and manifest.json into
/// out_dir. Deterministic given the config. Returns the exit status.
RunStatus run_scenario(const ScenarioConfig& config);

}  // namespace tunneltime
