#include "hotrack/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace hotrack {

CubicSpline::CubicSpline(std::vector<double> t, std::vector<double> y)
    : t_(std::move(t)), y_(std::move(y)) {
  const int n = static_cast<int>(t_.size());
  if (n < 2 || y_.size() != t_.size())
    throw DimensionMismatch("spline needs >= 2 knots and matching value count");
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(t_[i]) || !std::isfinite(y_[i]))
      throw NonFiniteInput("spline knot " + std::to_string(i) + " is not finite");
    if (i > 0 && !(t_[i] > t_[i - 1]))
      throw Error("spline knots must be strictly increasing");
  }

  // natural end conditions: second derivative zero at both ends
  c2_.assign(n, 0.0);
  if (n > 2) {
    std::vector<double> diag(n - 2), rhs(n - 2), upper(n - 2);
    for (int i = 1; i <= n - 2; ++i) {
      const double h0 = t_[i] - t_[i - 1];
      const double h1 = t_[i + 1] - t_[i];
      diag[i - 1] = 2.0 * (h0 + h1);
      upper[i - 1] = h1;
      rhs[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    // Thomas algorithm; lower diagonal equals the previous row's upper
    for (int i = 1; i < n - 2; ++i) {
      const double lower = t_[i + 1] - t_[i];
      const double w = lower / diag[i - 1];
      diag[i] -= w * upper[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    c2_[n - 2] = rhs[n - 3] / diag[n - 3];
    for (int i = n - 3; i >= 1; --i)
      c2_[i] = (rhs[i - 1] - upper[i - 1] * c2_[i + 1]) / diag[i - 1];
  }
}

int CubicSpline::segment(double t) const {
  if (t < t_.front() || t > t_.back())
    throw OutOfHorizon("spline query t=" + std::to_string(t) + " outside [" +
                       std::to_string(t_.front()) + "," + std::to_string(t_.back()) + "]");
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  int i = static_cast<int>(it - t_.begin()) - 1;
  return std::clamp(i, 0, static_cast<int>(t_.size()) - 2);
}

double CubicSpline::value(double t) const {
  const int i = segment(t);
  const double h = t_[i + 1] - t_[i];
  const double a = t_[i + 1] - t, b = t - t_[i];
  return c2_[i] * a * a * a / (6.0 * h) + c2_[i + 1] * b * b * b / (6.0 * h) +
         (y_[i] / h - c2_[i] * h / 6.0) * a + (y_[i + 1] / h - c2_[i + 1] * h / 6.0) * b;
}

double CubicSpline::derivative(double t) const {
  const int i = segment(t);
  const double h = t_[i + 1] - t_[i];
  const double a = t_[i + 1] - t, b = t - t_[i];
  return -c2_[i] * a * a / (2.0 * h) + c2_[i + 1] * b * b / (2.0 * h) -
         (y_[i] / h - c2_[i] * h / 6.0) + (y_[i + 1] / h - c2_[i + 1] * h / 6.0);
}

LeaderInput LeaderInput::sinusoid(double amplitude, double omega, double phase) {
  LeaderInput u;
  u.shape = Sinusoid{amplitude, omega, phase};
  return u;
}

LeaderInput LeaderInput::polynomial(std::vector<double> coeffs) {
  LeaderInput u;
  u.shape = Polynomial{std::move(coeffs)};
  return u;
}

LeaderInput LeaderInput::table(std::vector<double> t, std::vector<double> uvals) {
  LeaderInput u;
  u.shape = Table{CubicSpline(std::move(t), std::move(uvals))};
  return u;
}

double LeaderInput::value(double t) const {
  return std::visit(
      [t](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Zero>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, Sinusoid>) {
          return s.amplitude * std::sin(s.omega * t + s.phase);
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          double v = 0.0;
          for (auto it = s.coeffs.rbegin(); it != s.coeffs.rend(); ++it) v = v * t + *it;
          return v;
        } else {
          return s.spline.value(t);
        }
      },
      shape);
}

double LeaderInput::derivative(double t) const {
  return std::visit(
      [t](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Zero>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, Sinusoid>) {
          return s.amplitude * s.omega * std::cos(s.omega * t + s.phase);
        } else if constexpr (std::is_same_v<T, Polynomial>) {
          double v = 0.0;
          const int n = static_cast<int>(s.coeffs.size());
          for (int j = n - 1; j >= 1; --j) v = v * t + j * s.coeffs[j];
          return v;
        } else {
          return s.spline.derivative(t);
        }
      },
      shape);
}

double leader_input_eval(const LeaderInput& u0, double t) { return u0.value(t); }

Nonlinearity Nonlinearity::none() { return Nonlinearity{}; }

Nonlinearity Nonlinearity::cosine_sum() {
  Nonlinearity f;
  f.kind_ = Kind::cosine_sum;
  return f;
}

Nonlinearity Nonlinearity::custom(std::vector<double> rho, CustomFn fn) {
  Nonlinearity f;
  f.kind_ = Kind::custom;
  f.rho_ = std::move(rho);
  f.fn_ = std::move(fn);
  for (double r : f.rho_)
    if (!(r >= 0.0) || !std::isfinite(r))
      throw NonFiniteInput("custom nonlinearity needs finite nonnegative rho");
  if (!f.fn_) throw Error("custom nonlinearity needs an evaluator");
  return f;
}

double Nonlinearity::evaluate(int m, std::span<const double> xbar) const {
  if (m < 1 || static_cast<int>(xbar.size()) != m)
    throw DimensionMismatch("nonlinearity order " + std::to_string(m) + " given " +
                            std::to_string(xbar.size()) + " states");
  switch (kind_) {
    case Kind::none:
      return 0.0;
    case Kind::cosine_sum: {
      double s = 0.0;
      for (double x : xbar) s += std::cos(x);
      return s;
    }
    case Kind::custom:
      return fn_(m, xbar);
  }
  return 0.0;
}

std::vector<double> Nonlinearity::lipschitz_constants(int l) const {
  switch (kind_) {
    case Kind::none:
      return std::vector<double>(l, 0.0);
    case Kind::cosine_sum:
      return lipschitz_for_cosine_sum(l);
    case Kind::custom:
      if (static_cast<int>(rho_.size()) < l)
        throw DimensionMismatch("custom nonlinearity declares " + std::to_string(rho_.size()) +
                                " Lipschitz constants, need " + std::to_string(l));
      return std::vector<double>(rho_.begin(), rho_.begin() + l);
  }
  return {};
}

std::vector<double> lipschitz_for_cosine_sum(int l) {
  std::vector<double> rho(l);
  for (int m = 1; m <= l; ++m) rho[m - 1] = std::sqrt(static_cast<double>(m));
  return rho;
}

Eigen::VectorXd linear_drift(const Eigen::VectorXd& x, double u) {
  if (!x.allFinite() || !std::isfinite(u)) throw NonFiniteInput("drift input not finite");
  const int l = static_cast<int>(x.size());
  Eigen::VectorXd dx(l);
  dx.head(l - 1) = x.tail(l - 1);
  dx(l - 1) = u;
  return dx;
}

Eigen::VectorXd nonlinear_drift(const Eigen::VectorXd& x, double u, const Nonlinearity& f) {
  if (f.kind() == Nonlinearity::Kind::none) return linear_drift(x, u);
  Eigen::VectorXd dx = linear_drift(x, u);
  const int l = static_cast<int>(x.size());
  for (int m = 1; m <= l; ++m)
    dx(m - 1) += f.evaluate(m, std::span<const double>(x.data(), static_cast<size_t>(m)));
  return dx;
}

double max_input_derivative_fd(const LeaderInput& u0, double t0, double t1, int samples) {
  if (samples < 2 || !(t1 > t0)) throw DimensionMismatch("bad derivative sweep range");
  const double h = (t1 - t0) / samples;
  // central differences on the open interior keep table kinds inside range
  double worst = 0.0;
  for (int i = 1; i < samples; ++i) {
    const double t = t0 + i * h;
    const double d = (u0.value(t + h / 2) - u0.value(t - h / 2)) / h;
    worst = std::max(worst, std::abs(d));
  }
  return worst;
}

LipschitzAudit audit_lipschitz(const Nonlinearity& f, int l, int pairs, unsigned seed, double box,
                               double slack) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-box, box);
  const std::vector<double> rho = f.lipschitz_constants(l);

  LipschitzAudit audit;
  audit.worst_margin = std::numeric_limits<double>::infinity();
  std::vector<double> xi, eps;
  for (int m = 1; m <= l; ++m) {
    xi.resize(m);
    eps.resize(m);
    for (int p = 0; p < pairs; ++p) {
      double dist2 = 0.0;
      for (int q = 0; q < m; ++q) {
        xi[q] = uni(rng);
        eps[q] = uni(rng);
        dist2 += (xi[q] - eps[q]) * (xi[q] - eps[q]);
      }
      const double df = std::abs(f.evaluate(m, xi) - f.evaluate(m, eps));
      const double margin = rho[m - 1] * std::sqrt(dist2) - df;
      if (margin < audit.worst_margin) {
        audit.worst_margin = margin;
        audit.worst_m = m;
      }
      if (margin < -slack) audit.ok = false;
    }
  }
  return audit;
}

}  // namespace hotrack
