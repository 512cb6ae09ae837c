#include "hotrack/controllers.hpp"

#include <string>

namespace hotrack {

namespace {

void check_estimates(int n, int lm1, const Eigen::MatrixXd& x_hat, const Eigen::MatrixXd& x0_hat,
                     const Eigen::VectorXd& u0_hat, const Eigen::VectorXd& k) {
  if (x_hat.rows() != n || x0_hat.rows() != n || u0_hat.size() != n)
    throw DimensionMismatch("estimate row count != follower count");
  if (x_hat.cols() != lm1 || x0_hat.cols() != lm1)
    throw DimensionMismatch("estimate column count != l-1");
  if (k.size() != lm1 + 1)
    throw DimensionMismatch("gain vector k has size " + std::to_string(k.size()) + ", expected " +
                            std::to_string(lm1 + 1));
}

}  // namespace

Eigen::VectorXd linear_control(const Topology& t, const Eigen::VectorXd& x1_all,
                               const Eigen::MatrixXd& x_hat, const Eigen::MatrixXd& x0_hat,
                               const Eigen::VectorXd& u0_hat, const Eigen::VectorXd& k) {
  const int n = t.n_followers();
  const int lm1 = static_cast<int>(x_hat.cols());
  if (x1_all.size() != n + 1)
    throw DimensionMismatch("x1_all must hold leader plus all followers");
  check_estimates(n, lm1, x_hat, x0_hat, u0_hat, k);

  const Eigen::VectorXd x1 = x1_all.tail(n);
  const Eigen::VectorXd& b = t.leader_links();
  const Eigen::MatrixXd& a = t.adjacency();

  Eigen::VectorXd consensus = a.rowwise().sum().cwiseProduct(x1) - a * x1 +
                              b.cwiseProduct(x1 - Eigen::VectorXd::Constant(n, x1_all(0)));

  Eigen::VectorXd u = -k(0) * consensus + u0_hat;
  for (int m = 2; m <= lm1 + 1; ++m)
    u -= k(m - 1) * (x_hat.col(m - 2) - x0_hat.col(m - 2));
  return u;
}

Eigen::VectorXd nonlinear_control(const Eigen::VectorXd& x1, const Eigen::VectorXd& x0_hat1,
                                  const Eigen::MatrixXd& x_hat, const Eigen::MatrixXd& x0_hat,
                                  const Eigen::VectorXd& u0_hat, const Eigen::VectorXd& k) {
  const int n = static_cast<int>(x1.size());
  const int lm1 = static_cast<int>(x_hat.cols());
  if (x0_hat1.size() != n) throw DimensionMismatch("x0_hat1 size != follower count");
  check_estimates(n, lm1, x_hat, x0_hat, u0_hat, k);

  Eigen::VectorXd u = -k(0) * (x1 - x0_hat1) + u0_hat;
  for (int m = 2; m <= lm1 + 1; ++m)
    u -= k(m - 1) * (x_hat.col(m - 2) - x0_hat.col(m - 2));
  return u;
}

}  // namespace hotrack
