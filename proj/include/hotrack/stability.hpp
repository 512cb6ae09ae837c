#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hotrack/gains.hpp"
#include "hotrack/graph.hpp"
#include "hotrack/polynomial.hpp"
#include "hotrack/scenario.hpp"

namespace hotrack {

// Characteristic factors whose Hurwitzness certifies the linear design. One
// leader-observer and one tracking factor per eigenvalue lambda_i of H, plus a
// single self-observer factor shared by all followers:
//   leader observer: s^{l-1} + c0_2 li s^{l-2} + c0_2 li (c0_l + c0_{l-1} s + ... + c0_3 s^{l-3})
//   self observer:   s^{l-1} + r_2 s^{l-2} + r_2 (r_l + r_{l-1} s + ... + r_3 s^{l-3})
//   tracking:        s^l + k_l s^{l-1} + ... + k_2 s + k_1 li
struct DesignPolynomials {
  std::vector<RealPolynomial> leader_observer;  // one per lambda_i, ascending
  RealPolynomial self_observer;
  std::vector<RealPolynomial> tracking;  // one per lambda_i
};

DesignPolynomials theorem1_polynomials(int l, const GainSet& g, const Eigen::VectorXd& lambdas);

// Tracking factor of the nonlinear design; topology independent:
//   s^l + k_l s^{l-1} + ... + k_2 s + k_1
RealPolynomial theorem2_polynomial(int l, const Eigen::VectorXd& k);

// Stacked error-system matrices. Error vectors are state-major: block m holds
// the N per-follower errors of state order m.
struct ErrorSystemMatrices {
  Eigen::MatrixXd leader_observer;       // N(l-1): distributed leader-state observer
  Eigen::MatrixXd self_observer;         // N(l-1): per-follower self observer
  Eigen::MatrixXd tracking_consensus;    // Nl: linear design, -k_1 H in the last block row
  Eigen::MatrixXd leader_observer_full;  // Nl: adds the first-state estimator row
  Eigen::MatrixXd tracking_local;        // Nl: nonlinear design, -k_1 I instead of -k_1 H
};

ErrorSystemMatrices build_error_matrices(int l, const GainSet& g, const Eigen::MatrixXd& H);

// Unique symmetric solution of F^T Q + Q F = -eta I for Hurwitz F, via the
// Kronecker-vectorized dense solve. Throws NotHurwitz when no valid
// positive-definite solution exists (non-Hurwitz F).
Eigen::MatrixXd lyapunov_solve(const Eigen::MatrixXd& F, double eta);

// Small-gain conditions tying the Lipschitz constants to the Lyapunov
// certificates. With P-blocks diag(rho_1 I,...,rho_i I, 0,...) the spectral
// norm of each is a prefix max of rho, so the left sides reduce to sums of
// prefix maxima; both sides are reported as witnesses.
struct NormConditionResult {
  double sum_p0x = 0.0;      // sum_{i=1..l} ||P0x_i||
  double sum_px = 0.0;       // sum_{i=2..l} ||Px_i||
  double bound_leader = 0.0; // min(eta1/(2||Q1||), eta3/(2||Q3||))
  double bound_self = 0.0;   // eta2/(2||Q2||)
  bool leader_ok = false;
  bool self_ok = false;
};

NormConditionResult theorem2_norm_conditions(int l, const std::vector<double>& rho,
                                             const Eigen::MatrixXd& Q1, double eta1,
                                             const Eigen::MatrixXd& Q2, double eta2,
                                             const Eigen::MatrixXd& Q3, double eta3);

enum class ConditionStatus { pass, fail, skipped };

struct ConditionRecord {
  std::string name;
  ConditionStatus status = ConditionStatus::fail;
  std::string witness;
};

// Flat certification result. A condition is skipped only when a prerequisite
// condition already failed (e.g. a Lyapunov solve whose matrix is known to be
// non-Hurwitz); all_passed requires every condition to be pass.
struct StabilityReport {
  std::string design;  // "linear" or "nonlinear"
  std::vector<ConditionRecord> conditions;
  std::map<std::string, double> values;  // numeric witnesses for machine use

  bool all_passed() const;
  std::vector<std::string> failed_names() const;
  std::string to_text() const;
  std::string to_kv() const;  // one key=value per line
};

struct CertifyOptions {
  // diagnostic sweep over eta; the thresholds are scale invariant, so this
  // reports per-eta margins rather than changing any verdict
  bool eta_search = false;
};

// Certifies the linear design: coupling positive definiteness, the three
// polynomial families above, and the leader-input derivative bound audit.
StabilityReport check_theorem1(const Scenario& sc);

// Certifies the nonlinear design: observer polynomial families, the local
// tracking factor, Lyapunov certificates for the three stacked error systems,
// the small-gain norm conditions, and the input/Lipschitz audits.
StabilityReport check_theorem2(const Scenario& sc, const CertifyOptions& opts = {});

}  // namespace hotrack
