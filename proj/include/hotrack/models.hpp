#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hotrack/errors.hpp"

namespace hotrack {

// Natural cubic spline through strictly increasing knots; C2 on the knot range,
// queries outside it throw OutOfHorizon.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> t, std::vector<double> y);

  double value(double t) const;
  double derivative(double t) const;
  double t_min() const { return t_.front(); }
  double t_max() const { return t_.back(); }
  const std::vector<double>& knots_t() const { return t_; }
  const std::vector<double>& knots_y() const { return y_; }

 private:
  int segment(double t) const;
  std::vector<double> t_, y_, c2_;  // c2_: second derivatives at knots
};

// Exogenous leader control signal u0(t). The follower side never reads this
// directly; it reaches followers only through leader links.
struct LeaderInput {
  struct Zero {};
  struct Sinusoid {
    double amplitude = 1.0;
    double omega = 1.0;  // rad/s
    double phase = 0.0;
  };
  struct Polynomial {
    std::vector<double> coeffs;  // ascending powers: c0 + c1 t + ...
  };
  struct Table {
    CubicSpline spline;
  };

  std::variant<Zero, Sinusoid, Polynomial, Table> shape;
  // declared bound on |du0/dt|; audited by finite differences when present
  std::optional<double> derivative_bound_w;

  double value(double t) const;
  double derivative(double t) const;

  static LeaderInput zero() { return {Zero{}, 0.0}; }
  static LeaderInput sinusoid(double amplitude, double omega, double phase = 0.0);
  static LeaderInput polynomial(std::vector<double> coeffs);
  static LeaderInput table(std::vector<double> t, std::vector<double> u);
};

double leader_input_eval(const LeaderInput& u0, double t);

// Order-indexed drift terms f_m, shared by every agent. f_m sees only the
// first m states of its agent (lower-triangular structure).
class Nonlinearity {
 public:
  enum class Kind { none, cosine_sum, custom };
  using CustomFn = std::function<double(int m, std::span<const double> xbar)>;

  static Nonlinearity none();
  static Nonlinearity cosine_sum();
  // rho must list a Lipschitz constant per order 1..l it will be used with
  static Nonlinearity custom(std::vector<double> rho, CustomFn fn);

  Kind kind() const { return kind_; }
  // m in 1..l, xbar holds exactly m entries
  double evaluate(int m, std::span<const double> xbar) const;
  // rho_1..rho_l; zeros for none, sqrt(m) for cosine_sum, declared for custom
  std::vector<double> lipschitz_constants(int l) const;

 private:
  Kind kind_ = Kind::none;
  std::vector<double> rho_;
  CustomFn fn_;
};

// sqrt(m) bounds the gradient norm of x -> sum_{k<=m} cos(x_k)
std::vector<double> lipschitz_for_cosine_sum(int l);

// Integrator-chain right-hand side for one agent: dx_m = x_{m+1}, dx_l = u.
Eigen::VectorXd linear_drift(const Eigen::VectorXd& x, double u);
// Adds f_m(x_1..x_m) to each row; identical to linear_drift for Kind::none.
Eigen::VectorXd nonlinear_drift(const Eigen::VectorXd& x, double u, const Nonlinearity& f);

// Finite-difference sweep of |du0/dt| over [t0,t1]; returns the max observed.
double max_input_derivative_fd(const LeaderInput& u0, double t0, double t1, int samples);

// Randomized falsification of the declared Lipschitz constants on
// [-box, box]^m. ok is false if any sampled pair violates rho_m by more than
// slack; worst_* identify the closest call.
struct LipschitzAudit {
  bool ok = true;
  int worst_m = 0;
  double worst_margin = 0.0;  // min over samples of rho_m*dist - |df|
};
LipschitzAudit audit_lipschitz(const Nonlinearity& f, int l, int pairs, unsigned seed,
                               double box = 10.0, double slack = 1e-12);

}  // namespace hotrack
