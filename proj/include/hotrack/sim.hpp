#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hotrack/scenario.hpp"

namespace hotrack {

// Flattened closed-loop state. Block order (all row-major over followers):
//   [ leader x0 (l) | follower states (N*l) | u_hat (N) | d (N)
//     | z0 (N*(l-1)) | x0_hat1 (N, nonlinear only) | z (N*(l-1)) ]
struct StateLayout {
  int n = 0;      // followers
  int order = 0;  // l
  bool has_x0_hat1 = false;

  static StateLayout for_scenario(const Scenario& sc);

  int dim() const {
    return (n + 1) * order + 2 * n + 2 * n * (order - 1) + (has_x0_hat1 ? n : 0);
  }
  int agent(int i) const { return i * order; }  // i = 0 is the leader
  int u_hat() const { return (n + 1) * order; }
  int d() const { return u_hat() + n; }
  int z0() const { return d() + n; }
  int x0_hat1() const { return z0() + n * (order - 1); }
  int z() const { return x0_hat1() + (has_x0_hat1 ? n : 0); }
};

Eigen::VectorXd initial_state(const Scenario& sc, const StateLayout& lay);

struct ClosedLoopEval {
  Eigen::VectorXd dy;
  Eigen::VectorXd controls;  // u_i actually applied, size N
  double u0 = 0.0;           // leader input at t
};

// One right-hand-side evaluation of the complete closed loop: recompute
// estimates from internals, form controls, differentiate agents and all
// observers. Pure in (t, y). Throws NonFiniteState on non-finite input.
ClosedLoopEval closed_loop_derivative(const Scenario& sc, const StateLayout& lay, double t,
                                      const Eigen::VectorXd& y);

// Error signals reconstructed from a state snapshot; all are post-hoc views,
// nothing here feeds back into the loop.
struct ErrorSnapshot {
  Eigen::VectorXd input;         // u_hat_i - u0, size N
  Eigen::VectorXd leader_state;  // state-major; orders 2..l, plus order 1 first
                                 // when the first-state estimator is present
  Eigen::VectorXd self_state;    // state-major, orders 2..l
  Eigen::VectorXd tracking;      // state-major, orders 1..l
  std::array<double, 4> sup() const;
};

ErrorSnapshot error_snapshot(const Scenario& sc, const StateLayout& lay, double t,
                             const Eigen::VectorXd& y);

// Uniform-grid record of a run: one row per step including both endpoints.
struct TraceLog {
  Scenario scenario;
  StateLayout layout;
  std::vector<double> time;
  Eigen::MatrixXd states;    // rows x dim
  Eigen::MatrixXd controls;  // rows x N
  Eigen::MatrixXd error_sup;  // rows x 4: input, leader_state, self_state, tracking

  int rows() const { return static_cast<int>(time.size()); }
  ErrorSnapshot errors_at(int row) const;
  // smallest single-step increment of any adaptive gain d_i over the run;
  // nonnegative up to roundoff by construction of the adaptation law
  double min_gain_step() const;
};

// Fixed-step integration over ~round(horizon/dt) steps. Throws Diverged when
// the state leaves the 1e6 sup-norm box or turns non-finite, StepTooLarge on
// a >1e6-fold single-step growth.
TraceLog integrate(const Scenario& sc);

inline constexpr std::array<double, 3> kErrorThresholds{1e-1, 1e-2, 1e-3};

struct ErrorMetrics {
  std::array<double, 4> final_sup{};
  std::array<double, 4> peak_sup{};
  // first grid time at which each signal's sup norm drops below the threshold
  std::array<std::array<std::optional<double>, 3>, 4> first_crossing{};
};

ErrorMetrics error_metrics(const TraceLog& log);

}  // namespace hotrack
