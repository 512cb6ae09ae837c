#pragma once

#include <Eigen/Dense>

#include "hotrack/graph.hpp"

namespace hotrack {

// Tracking control for the linear design. x1_all stacks the measured first
// states with the leader in slot 0 and follower i in slot i. x_hat / x0_hat
// are the recomputed estimate matrices (N x (l-1), columns m=2..l). Follower i
// reads from neighbors only x_{j,1}; everything else is its own data.
//   u_i = -k_1 [ sum_j a_ij (x_{i,1} - x_{j,1}) + b_i (x_{i,1} - x_{0,1}) ]
//         - sum_{m=2..l} k_m (xhat_{i,m} - x0hat_{i,m}) + u0hat_i
Eigen::VectorXd linear_control(const Topology& t, const Eigen::VectorXd& x1_all,
                               const Eigen::MatrixXd& x_hat, const Eigen::MatrixXd& x0_hat,
                               const Eigen::VectorXd& u0_hat, const Eigen::VectorXd& k);

// Tracking control for the nonlinear design. No neighbor terms at all: the
// first-state error is formed against the follower's own estimate of the
// leader's first state.
//   u_i = -k_1 (x_{i,1} - x0hat1_i)
//         - sum_{m=2..l} k_m (xhat_{i,m} - x0hat_{i,m}) + u0hat_i
Eigen::VectorXd nonlinear_control(const Eigen::VectorXd& x1, const Eigen::VectorXd& x0_hat1,
                                  const Eigen::MatrixXd& x_hat, const Eigen::MatrixXd& x0_hat,
                                  const Eigen::VectorXd& u0_hat, const Eigen::VectorXd& k);

}  // namespace hotrack
