#pragma once

#include <complex>
#include <vector>

#include "hotrack/errors.hpp"

namespace hotrack {

// Monic real polynomial, coefficients stored highest power first with the
// leading 1 included: {1, a_{n-1}, ..., a_0}.
class RealPolynomial {
 public:
  explicit RealPolynomial(std::vector<double> coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  // coefficient of s^p
  double coeff(int p) const { return coeffs_[coeffs_.size() - 1 - p]; }

  // companion-matrix eigenvalues, sorted by (re, im) for determinism
  std::vector<std::complex<double>> roots() const;

 private:
  std::vector<double> coeffs_;
};

struct HurwitzResult {
  bool hurwitz = false;
  std::vector<std::complex<double>> roots;
  double max_real = 0.0;
};

// All roots strictly left of -margin. Degree 0 has no roots to test and is
// rejected as DegenerateDegree.
HurwitzResult hurwitz(const RealPolynomial& p, double margin = 1e-9);

}  // namespace hotrack
