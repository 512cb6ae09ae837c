#pragma once

#include <string>
#include <vector>

#include "hotrack/scenario.hpp"

namespace hotrack {

// One swept gain scalar. Grid specs are parsed from "name=lo:hi:count" where
// name is k1..kl, c01..c0l, r2..rl, tau, or d0 (the last two apply uniformly
// to every follower). count = 1 pins the value at lo.
struct GridAxis {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;

  double value(int step) const;
  static GridAxis parse(const std::string& spec);
};

struct SweepOptions {
  bool simulate = false;       // append short-run final errors per point
  double sim_horizon = 10.0;   // horizon override for the per-point runs
};

struct SweepPoint {
  std::vector<double> values;  // axis values, in axis order
  bool certified = false;
  std::string failed_clauses;  // ';'-joined clause names, empty when certified
  bool diverged = false;
  std::array<double, 4> final_sup{};  // meaningful only when simulated and not diverged
};

struct SweepResult {
  std::vector<GridAxis> axes;
  std::vector<SweepPoint> points;  // row-major in axis order, first axis slowest
  bool simulated = false;
};

// Evaluates the full cartesian grid. Point order is deterministic regardless
// of how many threads execute; each point applies its axis values to a copy of
// the base scenario and re-validates it.
SweepResult run_sweep_grid(const Scenario& base, const std::vector<GridAxis>& axes,
                           const SweepOptions& opts);

// axes..., certified, failed_clauses[, diverged, final error columns]
void write_sweep_csv(const SweepResult& result, const std::string& path);

}  // namespace hotrack
