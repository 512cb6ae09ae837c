#include "hotrack/observers.hpp"

#include <string>
#include <vector>

namespace hotrack {

namespace {

// (Lv)_i = sum_j a_ij (v_i - v_j)
Eigen::VectorXd disagreement(const Eigen::MatrixXd& adj, const Eigen::VectorXd& v) {
  return adj.rowwise().sum().cwiseProduct(v) - adj * v;
}

void check_n(const Topology& t, const Eigen::VectorXd& v, const char* what) {
  if (v.size() != t.n_followers())
    throw DimensionMismatch(std::string(what) + " has size " + std::to_string(v.size()) +
                            ", expected " + std::to_string(t.n_followers()));
}

}  // namespace

InputObserverDerivative input_observer_derivative(const InputObserverState& s, const Topology& t,
                                                  double u0, const Eigen::VectorXd& tau,
                                                  const SignumMode& sgn) {
  check_n(t, s.u_hat, "u_hat");
  check_n(t, s.d, "d");
  check_n(t, tau, "tau");
  if (!std::isfinite(u0)) throw NonFiniteInput("u0 not finite");

  const Eigen::VectorXd& b = t.leader_links();
  Eigen::VectorXd psi = disagreement(t.adjacency(), s.u_hat) +
                        b.cwiseProduct(s.u_hat - Eigen::VectorXd::Constant(b.size(), u0));

  InputObserverDerivative out;
  out.du_hat = -psi;
  for (Eigen::Index i = 0; i < psi.size(); ++i) out.du_hat(i) -= s.d(i) * sgn(psi(i));
  out.dd = tau.cwiseProduct(psi.cwiseAbs());
  return out;
}

Eigen::MatrixXd leader_state_estimates(const Eigen::MatrixXd& z0, const Topology& t, double x01,
                                       const Eigen::VectorXd& c0) {
  const int n = t.n_followers();
  const int lm1 = static_cast<int>(z0.cols());
  if (z0.rows() != n) throw DimensionMismatch("z0 row count != follower count");
  if (c0.size() < lm1 + 1) throw DimensionMismatch("c0 shorter than state order");

  Eigen::MatrixXd hats(n, lm1);
  hats.col(0) = z0.col(0) + c0(1) * x01 * t.leader_links();
  for (int m = 3; m <= lm1 + 1; ++m)
    hats.col(m - 2) = z0.col(m - 2) + c0(m - 1) * hats.col(m - 3);
  return hats;
}

Eigen::MatrixXd leader_state_observer_derivative_linear(const LeaderStateObserverState& s,
                                                        const Topology& t, double x01,
                                                        const Eigen::VectorXd& u_hat,
                                                        const Eigen::VectorXd& c0) {
  const int n = t.n_followers();
  const int lm1 = static_cast<int>(s.z0.cols());
  const int l = lm1 + 1;
  check_n(t, u_hat, "u_hat");
  if (!std::isfinite(x01)) throw NonFiniteInput("x01 not finite");

  const Eigen::VectorXd& b = t.leader_links();
  const Eigen::MatrixXd hats = leader_state_estimates(s.z0, t, x01, c0);

  Eigen::MatrixXd dz0(n, lm1);
  // first internal row couples through the graph and the leader links
  dz0.col(0) = -c0(1) * b.cwiseProduct(s.z0.col(0)) -
               c0(1) * c0(1) * x01 * b.cwiseProduct(b) -
               c0(1) * disagreement(t.adjacency(), hats.col(0)) + hats.col(1);
  // interior rows are a local cascade
  for (int m = 3; m <= l - 1; ++m)
    dz0.col(m - 2) = -c0(m - 1) * s.z0.col(m - 2) -
                     c0(m - 1) * c0(m - 1) * hats.col(m - 3) + hats.col(m - 1);
  // last row is driven by the estimated leader input
  dz0.col(l - 2) =
      -c0(l - 1) * s.z0.col(l - 2) - c0(l - 1) * c0(l - 1) * hats.col(l - 3) + u_hat;
  return dz0;
}

LeaderStateObserverDerivative leader_state_observer_derivative_nonlinear(
    const LeaderStateObserverState& s, const Topology& t, double x01,
    const Eigen::VectorXd& u_hat, const Eigen::VectorXd& c0, const Nonlinearity& f) {
  const int n = t.n_followers();
  const int lm1 = static_cast<int>(s.z0.cols());
  const int l = lm1 + 1;
  check_n(t, s.x0_hat1, "x0_hat1");

  LeaderStateObserverDerivative out;
  out.dz0 = leader_state_observer_derivative_linear(s, t, x01, u_hat, c0);

  const Eigen::VectorXd& b = t.leader_links();
  const Eigen::MatrixXd hats = leader_state_estimates(s.z0, t, x01, c0);

  Eigen::VectorXd psi = disagreement(t.adjacency(), s.x0_hat1) +
                        b.cwiseProduct(s.x0_hat1 - Eigen::VectorXd::Constant(n, x01));
  out.dx0_hat1 = -c0(0) * psi + hats.col(0);

  const double f1_measured = f.evaluate(1, std::span<const double>(&x01, 1));
  std::vector<double> chain(l);
  for (int i = 0; i < n; ++i) {
    chain[0] = s.x0_hat1(i);
    for (int m = 2; m <= l; ++m) chain[m - 1] = hats(i, m - 2);

    out.dx0_hat1(i) += f.evaluate(1, std::span<const double>(chain.data(), 1));
    // drift compensation: f_m along the estimate chain, previous-order term
    // removed with the same gain that created it in the output identity
    out.dz0(i, 0) += f.evaluate(2, std::span<const double>(chain.data(), 2)) -
                     b(i) * c0(1) * f1_measured;
    for (int m = 3; m <= l; ++m)
      out.dz0(i, m - 2) +=
          f.evaluate(m, std::span<const double>(chain.data(), static_cast<size_t>(m))) -
          c0(m - 1) *
              f.evaluate(m - 1, std::span<const double>(chain.data(), static_cast<size_t>(m - 1)));
  }
  return out;
}

Eigen::MatrixXd self_state_estimates(const Eigen::MatrixXd& z, const Eigen::VectorXd& x1,
                                     const Eigen::VectorXd& r) {
  const int n = static_cast<int>(z.rows());
  const int lm1 = static_cast<int>(z.cols());
  if (x1.size() != n) throw DimensionMismatch("x1 size != follower count");
  if (r.size() != lm1) throw DimensionMismatch("r size != l-1");

  Eigen::MatrixXd hats(n, lm1);
  hats.col(0) = z.col(0) + r(0) * x1;
  for (int m = 3; m <= lm1 + 1; ++m) hats.col(m - 2) = z.col(m - 2) + r(m - 2) * hats.col(m - 3);
  return hats;
}

Eigen::MatrixXd self_state_observer_derivative_linear(const SelfStateObserverState& s,
                                                      const Eigen::VectorXd& x1,
                                                      const Eigen::VectorXd& u,
                                                      const Eigen::VectorXd& r) {
  const int n = static_cast<int>(s.z.rows());
  const int lm1 = static_cast<int>(s.z.cols());
  const int l = lm1 + 1;
  if (u.size() != n) throw DimensionMismatch("u size != follower count");

  const Eigen::MatrixXd hats = self_state_estimates(s.z, x1, r);

  Eigen::MatrixXd dz(n, lm1);
  dz.col(0) = -r(0) * s.z.col(0) - r(0) * r(0) * x1 + hats.col(1);
  for (int m = 3; m <= l - 1; ++m)
    dz.col(m - 2) = -r(m - 2) * s.z.col(m - 2) - r(m - 2) * r(m - 2) * hats.col(m - 3) +
                    hats.col(m - 1);
  dz.col(l - 2) = -r(l - 2) * s.z.col(l - 2) - r(l - 2) * r(l - 2) * hats.col(l - 3) + u;
  return dz;
}

Eigen::MatrixXd self_state_observer_derivative_nonlinear(const SelfStateObserverState& s,
                                                         const Eigen::VectorXd& x1,
                                                         const Eigen::VectorXd& u,
                                                         const Eigen::VectorXd& r,
                                                         const Nonlinearity& f) {
  Eigen::MatrixXd dz = self_state_observer_derivative_linear(s, x1, u, r);
  if (f.kind() == Nonlinearity::Kind::none) return dz;

  const int n = static_cast<int>(s.z.rows());
  const int l = static_cast<int>(s.z.cols()) + 1;
  const Eigen::MatrixXd hats = self_state_estimates(s.z, x1, r);

  // chains take the measured first state followed by estimated higher states
  std::vector<double> chain(l);
  for (int i = 0; i < n; ++i) {
    chain[0] = x1(i);
    for (int m = 2; m <= l; ++m) chain[m - 1] = hats(i, m - 2);

    dz(i, 0) += f.evaluate(2, std::span<const double>(chain.data(), 2)) -
                r(0) * f.evaluate(1, std::span<const double>(chain.data(), 1));
    for (int m = 3; m <= l; ++m)
      dz(i, m - 2) +=
          f.evaluate(m, std::span<const double>(chain.data(), static_cast<size_t>(m))) -
          r(m - 2) *
              f.evaluate(m - 1, std::span<const double>(chain.data(), static_cast<size_t>(m - 1)));
  }
  return dz;
}

}  // namespace hotrack
