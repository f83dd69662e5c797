#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tunneltime/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Relativistic tunnelling traversal-time scenarios"};
  app.footer("Scenarios: fig1, eta-scan, sumrule, causality, weakdemo, free-check");

  std::string scenario;
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  bool quiet = false;

  app.add_option("--scenario", scenario, "Scenario name")->required();
  app.add_option("--config", config_path, "JSON config file merged over the defaults");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--set", overrides, "Override key=value (dotted keys, repeatable)");
  app.add_flag("--quiet", quiet, "Suppress progress lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(tunneltime::RunStatus::usage_error);
  }

  try {
    const tunneltime::ScenarioConfig cfg =
        tunneltime::make_config(scenario, config_path, overrides, out_dir, quiet);
    return static_cast<int>(tunneltime::run_scenario(cfg));
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return static_cast<int>(tunneltime::RunStatus::usage_error);
  } catch (const std::exception& e) {
    std::cerr << "physics error: " << e.what() << "\n";
    return static_cast<int>(tunneltime::RunStatus::physics_error);
  }
}
