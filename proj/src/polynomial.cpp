#include "hotrack/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace hotrack {

RealPolynomial::RealPolynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw DegenerateDegree("polynomial needs at least the leading coefficient");
  if (coeffs_.front() != 1.0) throw Error("polynomial must be monic with an explicit leading 1");
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw NonFiniteInput("polynomial coefficient not finite");
}

std::vector<std::complex<double>> RealPolynomial::roots() const {
  const int n = degree();
  if (n == 0) return {};

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -coeffs_[n - i];

  Eigen::EigenSolver<Eigen::MatrixXd> es(companion);
  if (es.info() != Eigen::Success) throw Error("companion eigensolver failed");

  std::vector<std::complex<double>> out(n);
  for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()(i);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

HurwitzResult hurwitz(const RealPolynomial& p, double margin) {
  if (p.degree() < 1) throw DegenerateDegree("hurwitz test needs degree >= 1");
  HurwitzResult r;
  r.roots = p.roots();
  r.max_real = -std::numeric_limits<double>::infinity();
  for (const auto& z : r.roots) r.max_real = std::max(r.max_real, z.real());
  r.hurwitz = r.max_real < -margin;
  return r;
}

}  // namespace hotrack
