#pragma once

#include <Eigen/Dense>

namespace hotrack {

// Classical fourth-order Runge-Kutta step. rhs(t, y) -> dy/dt. k1 can be
// passed in when the caller already evaluated it (reused for logging).
template <class Rhs>
Eigen::VectorXd rk4_step(Rhs&& rhs, double t, const Eigen::VectorXd& y, double h,
                         const Eigen::VectorXd& k1) {
  const Eigen::VectorXd k2 = rhs(t + h / 2.0, (y + (h / 2.0) * k1).eval());
  const Eigen::VectorXd k3 = rhs(t + h / 2.0, (y + (h / 2.0) * k2).eval());
  const Eigen::VectorXd k4 = rhs(t + h, (y + h * k3).eval());
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <class Rhs>
Eigen::VectorXd rk4_step(Rhs&& rhs, double t, const Eigen::VectorXd& y, double h) {
  const Eigen::VectorXd k1 = rhs(t, y);
  return rk4_step(rhs, t, y, h, k1);
}

}  // namespace hotrack
