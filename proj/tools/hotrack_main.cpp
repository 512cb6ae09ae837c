#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hotrack/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Observer-based leader-follower tracking for high-order agents: "
               "simulate closed loops, certify gain sets, sweep gain grids."};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<std::string> out_flag;
  hotrack::RunOverrides overrides;
  bool eta_search = false;
  bool kv = false;
  bool simulate_points = false;
  std::vector<std::string> grid_specs;

  auto add_common = [&](CLI::App* cmd, bool with_out) {
    cmd->add_option("scenario", scenario_path, "scenario file (JSON)")->required();
    if (with_out)
      cmd->add_option("--out", out_flag,
                      "output directory (default: $HOTRACK_OUT_DIR, then '.')");
    cmd->add_option("--dt", overrides.dt, "override integration step");
    cmd->add_option("--horizon", overrides.horizon, "override time horizon");
    cmd->add_option("--sgn-mode", overrides.sgn_mode,
                    "switching function: hard or boundary_layer");
    cmd->add_option("--epsilon", overrides.epsilon, "boundary layer width");
  };

  CLI::App* simulate = app.add_subcommand(
      "simulate", "integrate the closed loop and write trace.csv, errors.csv, summary.txt");
  add_common(simulate, true);

  CLI::App* certify = app.add_subcommand(
      "certify", "evaluate every stability clause for the scenario's design");
  add_common(certify, false);
  certify->add_flag("--eta-search", eta_search,
                    "report small-gain margins across a range of Lyapunov scales");
  certify->add_flag("--kv", kv, "append machine-readable key=value lines");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "certify (and optionally simulate) every point of a gain grid");
  add_common(sweep, true);
  sweep->add_option("--grid", grid_specs, "axis spec name=lo:hi:count (repeatable)")
      ->required()
      ->expected(-1);
  sweep->add_flag("--simulate", simulate_points,
                  "also run a short simulation per grid point");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed())
      return hotrack::run_simulate(scenario_path, hotrack::resolve_out_dir(out_flag),
                                   overrides, std::cout, std::cerr);
    if (certify->parsed())
      return hotrack::run_certify(scenario_path, eta_search, kv, overrides, std::cout,
                                  std::cerr);
    return hotrack::run_sweep(scenario_path, grid_specs, simulate_points,
                              hotrack::resolve_out_dir(out_flag), overrides, std::cout,
                              std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hotrack::kExitFailure;
  }
}
