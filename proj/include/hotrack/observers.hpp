#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "hotrack/gains.hpp"
#include "hotrack/graph.hpp"
#include "hotrack/models.hpp"

namespace hotrack {

// Switching function used by the adaptive input observer. hard returns exact
// sign with sgn(0) = 0; boundary_layer smooths it as tanh(v/epsilon).
struct SignumMode {
  enum class Kind { hard, boundary_layer };
  Kind kind = Kind::hard;
  double epsilon = 1e-2;

  double operator()(double v) const {
    if (kind == Kind::hard) return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    return std::tanh(v / epsilon);
  }
};

// ---------------------------------------------------------------------------
// Adaptive distributed estimator of the leader's control input. Follower i
// sees u0 itself only when b_i > 0; everyone else relies on consensus with
// neighbors plus the adaptive switching term.
// ---------------------------------------------------------------------------

struct InputObserverState {
  Eigen::VectorXd u_hat;  // per-follower estimate of u0
  Eigen::VectorXd d;      // adaptive switching gains, nondecreasing in time
};

struct InputObserverDerivative {
  Eigen::VectorXd du_hat;
  Eigen::VectorXd dd;
};

InputObserverDerivative input_observer_derivative(const InputObserverState& s, const Topology& t,
                                                  double u0, const Eigen::VectorXd& tau,
                                                  const SignumMode& sgn = {});

// ---------------------------------------------------------------------------
// Distributed observer of the leader's state. Followers integrate internal
// variables z0 (columns m=2..l); the estimates themselves are recomputed from
// z0 through the output identities every time they are needed and never
// integrated directly. In nonlinear mode each follower additionally carries an
// estimate of the leader's first state (x0_hat1), which is integrated.
// ---------------------------------------------------------------------------

struct LeaderStateObserverState {
  Eigen::VectorXd x0_hat1;  // size N in nonlinear use, empty otherwise
  Eigen::MatrixXd z0;       // N x (l-1), column m-2 belongs to state order m
};

// Output identities: column m-2 holds x0hat_{i,m},
//   x0hat_{i,2} = z0_{i,2} + b_i c0_2 x01,
//   x0hat_{i,m} = z0_{i,m} + c0_m x0hat_{i,m-1},  m = 3..l.
Eigen::MatrixXd leader_state_estimates(const Eigen::MatrixXd& z0, const Topology& t, double x01,
                                       const Eigen::VectorXd& c0);

Eigen::MatrixXd leader_state_observer_derivative_linear(const LeaderStateObserverState& s,
                                                        const Topology& t, double x01,
                                                        const Eigen::VectorXd& u_hat,
                                                        const Eigen::VectorXd& c0);

struct LeaderStateObserverDerivative {
  Eigen::VectorXd dx0_hat1;
  Eigen::MatrixXd dz0;
};

// Adds drift compensation f_m evaluated along the estimate chain
// (x0hat_{i,1}, ..., x0hat_{i,m}); the measured x01 enters f only through
// b_i-scaled correction terms. Reduces exactly to the linear operation when f
// is Kind::none (apart from the extra first-state estimator row).
LeaderStateObserverDerivative leader_state_observer_derivative_nonlinear(
    const LeaderStateObserverState& s, const Topology& t, double x01,
    const Eigen::VectorXd& u_hat, const Eigen::VectorXd& c0, const Nonlinearity& f);

// ---------------------------------------------------------------------------
// Per-follower observer of the follower's own unmeasured states x_{i,2..l},
// driven by the measured first state and the applied control. Same
// internal-variable scheme: z is integrated, estimates are recomputed.
// ---------------------------------------------------------------------------

struct SelfStateObserverState {
  Eigen::MatrixXd z;  // N x (l-1)
};

// Output identities: xhat_{i,2} = z_{i,2} + r_2 x_{i,1},
// xhat_{i,m} = z_{i,m} + r_m xhat_{i,m-1}.
Eigen::MatrixXd self_state_estimates(const Eigen::MatrixXd& z, const Eigen::VectorXd& x1,
                                     const Eigen::VectorXd& r);

Eigen::MatrixXd self_state_observer_derivative_linear(const SelfStateObserverState& s,
                                                      const Eigen::VectorXd& x1,
                                                      const Eigen::VectorXd& u,
                                                      const Eigen::VectorXd& r);

// Drift compensation chains mix the measured first state with estimated higher
// states: f_m(x_{i,1}, xhat_{i,2}, ..., xhat_{i,m}).
Eigen::MatrixXd self_state_observer_derivative_nonlinear(const SelfStateObserverState& s,
                                                         const Eigen::VectorXd& x1,
                                                         const Eigen::VectorXd& u,
                                                         const Eigen::VectorXd& r,
                                                         const Nonlinearity& f);

}  // namespace hotrack
