#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hotrack/scenario.hpp"

namespace hotrack {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;        // unexpected error
inline constexpr int kExitValidation = 2;     // unreadable or invalid scenario
inline constexpr int kExitDivergence = 3;     // integration blew up
inline constexpr int kExitCertification = 4;  // at least one clause failed

// Output directory resolution: --out wins, then this environment variable,
// then the current directory.
inline constexpr const char* kOutDirEnvVar = "HOTRACK_OUT_DIR";

struct RunOverrides {
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<std::string> sgn_mode;  // "hard" or "boundary_layer"
  std::optional<double> epsilon;
};

std::string resolve_out_dir(const std::optional<std::string>& out_flag);

// Loads, simulates, writes trace.csv / errors.csv / summary.txt into out_dir.
int run_simulate(const std::string& scenario_path, const std::string& out_dir,
                 const RunOverrides& overrides, std::ostream& out, std::ostream& err);

// Loads and certifies; prints the report, plus machine-readable key=value
// lines when kv is set.
int run_certify(const std::string& scenario_path, bool eta_search, bool kv,
                const RunOverrides& overrides, std::ostream& out, std::ostream& err);

// Loads, evaluates a gain grid, writes sweep.csv into out_dir.
int run_sweep(const std::string& scenario_path, const std::vector<std::string>& grid_specs,
              bool simulate_points, const std::string& out_dir, const RunOverrides& overrides,
              std::ostream& out, std::ostream& err);

}  // namespace hotrack
