#include "hotrack/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace hotrack {

namespace {

constexpr double kHurwitzMargin = 1e-9;
constexpr unsigned kAuditSeed = 20240817u;
constexpr int kAuditPairs = 10000;
constexpr int kDerivativeSamples = 4096;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

DesignPolynomials theorem1_polynomials(int l, const GainSet& g, const Eigen::VectorXd& lambdas) {
  if (l < 3) throw DegenerateDegree("design polynomials need state order >= 3");

  DesignPolynomials out{{}, RealPolynomial({1.0, 0.0}), {}};

  std::vector<double> self(l);
  self[0] = 1.0;
  self[1] = g.rm(2);
  for (int j = 2; j <= l - 1; ++j) self[j] = g.rm(2) * g.rm(j + 1);
  out.self_observer = RealPolynomial(self);

  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    const double li = lambdas(i);

    std::vector<double> lead(l);
    lead[0] = 1.0;
    lead[1] = g.c0m(2) * li;
    for (int j = 2; j <= l - 1; ++j) lead[j] = g.c0m(2) * li * g.c0m(j + 1);
    out.leader_observer.emplace_back(lead);

    std::vector<double> track(l + 1);
    track[0] = 1.0;
    for (int j = 1; j <= l - 1; ++j) track[j] = g.km(l - j + 1);
    track[l] = g.km(1) * li;
    out.tracking.emplace_back(track);
  }
  return out;
}

RealPolynomial theorem2_polynomial(int l, const Eigen::VectorXd& k) {
  if (l < 1 || k.size() != l) throw DimensionMismatch("gain vector size must equal state order");
  std::vector<double> coeffs(l + 1);
  coeffs[0] = 1.0;
  for (int j = 1; j <= l; ++j) coeffs[j] = k(l - j);
  return RealPolynomial(coeffs);
}

ErrorSystemMatrices build_error_matrices(int l, const GainSet& g, const Eigen::MatrixXd& H) {
  if (l < 3) throw DegenerateDegree("error matrices need state order >= 3");
  const int n = static_cast<int>(H.rows());
  if (H.cols() != n) throw DimensionMismatch("H must be square");

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  ErrorSystemMatrices m;

  // observer error systems: (l-1) block rows for state orders 2..l; every row
  // couples back into the order-2 block, upper shifts are identities
  m.leader_observer = Eigen::MatrixXd::Zero(n * (l - 1), n * (l - 1));
  m.self_observer = Eigen::MatrixXd::Zero(n * (l - 1), n * (l - 1));
  for (int p = 1; p <= l - 1; ++p) {
    const int row = (p - 1) * n;
    const double cp = (p == 1) ? g.c0m(2) : g.c0m(p + 1) * g.c0m(2);
    const double rp = (p == 1) ? g.rm(2) : g.rm(p + 1) * g.rm(2);
    m.leader_observer.block(row, 0, n, n) = -cp * H;
    m.self_observer.block(row, 0, n, n) = -rp * I;
    if (p <= l - 2) {
      m.leader_observer.block(row, p * n, n, n) = I;
      m.self_observer.block(row, p * n, n, n) = I;
    }
  }

  // tracking error systems: integrator chain with all gains in the last row
  m.tracking_consensus = Eigen::MatrixXd::Zero(n * l, n * l);
  m.tracking_local = Eigen::MatrixXd::Zero(n * l, n * l);
  for (int p = 1; p <= l - 1; ++p) {
    m.tracking_consensus.block((p - 1) * n, p * n, n, n) = I;
    m.tracking_local.block((p - 1) * n, p * n, n, n) = I;
  }
  const int last = (l - 1) * n;
  for (int q = 1; q <= l; ++q) {
    m.tracking_consensus.block(last, (q - 1) * n, n, n) = (q == 1) ? (-g.km(1) * H).eval()
                                                                  : (-g.km(q) * I).eval();
    m.tracking_local.block(last, (q - 1) * n, n, n) = -g.km(q) * I;
  }

  // full leader observer: first-state estimator row on top, the plain leader
  // observer shifted one block right underneath (block lower triangular in the
  // two groups, so its spectrum is {-c0_1 lambda_i} plus the plain one's)
  m.leader_observer_full = Eigen::MatrixXd::Zero(n * l, n * l);
  m.leader_observer_full.block(0, 0, n, n) = -g.c0m(1) * H;
  m.leader_observer_full.block(0, n, n, n) = I;
  m.leader_observer_full.block(n, n, n * (l - 1), n * (l - 1)) = m.leader_observer;
  return m;
}

Eigen::MatrixXd lyapunov_solve(const Eigen::MatrixXd& F, double eta) {
  const int n = static_cast<int>(F.rows());
  if (F.cols() != n || n == 0) throw DimensionMismatch("F must be square and nonempty");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw NonFiniteInput("eta must be positive");

  // vec(F^T Q) + vec(Q F) = (I kron F^T + F^T kron I) vec(Q)
  const int n2 = n * n;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n2, n2);
  for (int j = 0; j < n; ++j) K.block(j * n, j * n, n, n) = F.transpose();
  for (int bi = 0; bi < n; ++bi)
    for (int bj = 0; bj < n; ++bj)
      K.block(bi * n, bj * n, n, n).diagonal().array() += F(bj, bi);

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n2);
  for (int i = 0; i < n; ++i) rhs(i * n + i) = -eta;

  Eigen::VectorXd q = K.partialPivLu().solve(rhs);
  Eigen::MatrixXd Q = Eigen::Map<Eigen::MatrixXd>(q.data(), n, n);
  Q = ((Q + Q.transpose()) / 2.0).eval();

  const double qnorm = Q.norm();
  const double residual =
      (F.transpose() * Q + Q * F + eta * Eigen::MatrixXd::Identity(n, n)).norm();
  if (!Q.allFinite() || residual >= 1e-8 * std::max(qnorm, 1e-300))
    throw NotHurwitz("no solution: residual " + fmt(residual) + " for ||Q||_F " + fmt(qnorm));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
  if (es.info() != Eigen::Success || es.eigenvalues()(0) <= 0.0)
    throw NotHurwitz("solution not positive definite: min eig " +
                     fmt(es.info() == Eigen::Success ? es.eigenvalues()(0)
                                                     : std::nan("")));
  return Q;
}

namespace {

double spectral_norm_sym(const Eigen::MatrixXd& Q) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

NormConditionResult theorem2_norm_conditions(int l, const std::vector<double>& rho,
                                             const Eigen::MatrixXd& Q1, double eta1,
                                             const Eigen::MatrixXd& Q2, double eta2,
                                             const Eigen::MatrixXd& Q3, double eta3) {
  if (static_cast<int>(rho.size()) != l)
    throw DimensionMismatch("rho must list one constant per state order");

  NormConditionResult r;
  double prefix = 0.0;
  for (int i = 1; i <= l; ++i) {
    prefix = std::max(prefix, rho[i - 1]);  // ||diag(rho_1 I,...,rho_i I,0,..)||
    r.sum_p0x += prefix;
  }
  prefix = 0.0;
  for (int i = 2; i <= l; ++i) {
    prefix = std::max(prefix, rho[i - 1]);
    r.sum_px += prefix;
  }

  r.bound_leader =
      std::min(eta1 / (2.0 * spectral_norm_sym(Q1)), eta3 / (2.0 * spectral_norm_sym(Q3)));
  r.bound_self = eta2 / (2.0 * spectral_norm_sym(Q2));
  r.leader_ok = r.sum_p0x < r.bound_leader;
  r.self_ok = r.sum_px < r.bound_self;
  return r;
}

bool StabilityReport::all_passed() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const ConditionRecord& c) { return c.status == ConditionStatus::pass; });
}

std::vector<std::string> StabilityReport::failed_names() const {
  std::vector<std::string> out;
  for (const auto& c : conditions)
    if (c.status == ConditionStatus::fail) out.push_back(c.name);
  return out;
}

std::string StabilityReport::to_text() const {
  std::ostringstream os;
  os << "certification report (" << design << " design)\n";
  for (const auto& c : conditions) {
    const char* tag = c.status == ConditionStatus::pass   ? "PASS"
                      : c.status == ConditionStatus::fail ? "FAIL"
                                                          : "SKIP";
    os << "  [" << tag << "] " << c.name;
    if (!c.witness.empty()) os << ": " << c.witness;
    os << "\n";
  }
  os << "overall: " << (all_passed() ? "PASS" : "FAIL") << "\n";
  return os.str();
}

std::string StabilityReport::to_kv() const {
  std::ostringstream os;
  os << "design=" << design << "\n";
  os << "overall=" << (all_passed() ? "pass" : "fail") << "\n";
  for (const auto& c : conditions) {
    const char* tag = c.status == ConditionStatus::pass   ? "pass"
                      : c.status == ConditionStatus::fail ? "fail"
                                                          : "skip";
    os << "condition." << c.name << "=" << tag << "\n";
  }
  for (const auto& [k, v] : values) os << "value." << k << "=" << fmt_full(v) << "\n";
  return os.str();
}

namespace {

ConditionRecord poly_condition(const std::string& name, const RealPolynomial& p,
                               StabilityReport& report) {
  const HurwitzResult h = hurwitz(p, kHurwitzMargin);
  report.values[name + ".max_real"] = h.max_real;
  return {name, h.hurwitz ? ConditionStatus::pass : ConditionStatus::fail,
          "max Re(root) = " + fmt(h.max_real)};
}

void common_premises(const Scenario& sc, const GraphMatrices& gm, StabilityReport& report) {
  const double lmin = gm.h_eigenvalues(0);
  report.values["lambda_min"] = lmin;
  report.values["lambda_max"] = gm.h_eigenvalues(gm.h_eigenvalues.size() - 1);
  report.conditions.push_back(
      {"coupling_positive_definite",
       gm.positive_definite() ? ConditionStatus::pass : ConditionStatus::fail,
       "min eigenvalue of H = " + fmt(lmin) +
           (leader_globally_reachable(sc.topology) ? "" : " (leader not globally reachable)")});

  const double fd_max =
      max_input_derivative_fd(sc.leader_input, 0.0, sc.integration.horizon, kDerivativeSamples);
  report.values["input_derivative.observed_max"] = fd_max;
  if (sc.leader_input.derivative_bound_w) {
    const double w = *sc.leader_input.derivative_bound_w;
    report.values["input_derivative.declared"] = w;
    const bool ok = fd_max <= w * (1.0 + 1e-6) + 1e-9;
    report.conditions.push_back({"input_derivative_bounded",
                                 ok ? ConditionStatus::pass : ConditionStatus::fail,
                                 "observed max " + fmt(fd_max) + " vs declared " + fmt(w)});
  } else {
    report.conditions.push_back({"input_derivative_bounded", ConditionStatus::pass,
                                 "no bound declared; observed max " + fmt(fd_max) +
                                     " on the horizon"});
  }
}

}  // namespace

StabilityReport check_theorem1(const Scenario& sc) {
  if (sc.mode != DynamicsMode::linear)
    throw Error("linear-design certification called on a nonlinear scenario");
  sc.gains.validate(sc.order, sc.n_followers());

  StabilityReport report;
  report.design = "linear";
  const GraphMatrices gm = graph_matrices(sc.topology);
  common_premises(sc, gm, report);

  const DesignPolynomials polys = theorem1_polynomials(sc.order, sc.gains, gm.h_eigenvalues);
  for (size_t i = 0; i < polys.leader_observer.size(); ++i) {
    report.values["lambda[" + std::to_string(i + 1) + "]"] = gm.h_eigenvalues(i);
    report.conditions.push_back(poly_condition(
        "leader_observer_factor[" + std::to_string(i + 1) + "]", polys.leader_observer[i], report));
  }
  report.conditions.push_back(poly_condition("self_observer_factor", polys.self_observer, report));
  for (size_t i = 0; i < polys.tracking.size(); ++i)
    report.conditions.push_back(poly_condition("tracking_factor[" + std::to_string(i + 1) + "]",
                                               polys.tracking[i], report));
  return report;
}

StabilityReport check_theorem2(const Scenario& sc, const CertifyOptions& opts) {
  if (sc.mode != DynamicsMode::nonlinear)
    throw Error("nonlinear-design certification called on a linear scenario");
  sc.gains.validate(sc.order, sc.n_followers());

  StabilityReport report;
  report.design = "nonlinear";
  const GraphMatrices gm = graph_matrices(sc.topology);
  common_premises(sc, gm, report);
  const bool coupling_ok = gm.positive_definite();

  {
    const LipschitzAudit audit =
        audit_lipschitz(sc.nonlinearity, sc.order, kAuditPairs, kAuditSeed, 10.0, 1e-9);
    report.values["lipschitz.worst_margin"] = audit.worst_margin;
    report.conditions.push_back({"lipschitz_declared",
                                 audit.ok ? ConditionStatus::pass : ConditionStatus::fail,
                                 "worst sampled margin " + fmt(audit.worst_margin) +
                                     " at order " + std::to_string(audit.worst_m)});
  }

  const DesignPolynomials polys = theorem1_polynomials(sc.order, sc.gains, gm.h_eigenvalues);
  bool leader_factors_ok = true;
  for (size_t i = 0; i < polys.leader_observer.size(); ++i) {
    report.values["lambda[" + std::to_string(i + 1) + "]"] = gm.h_eigenvalues(i);
    ConditionRecord c = poly_condition("leader_observer_factor[" + std::to_string(i + 1) + "]",
                                       polys.leader_observer[i], report);
    leader_factors_ok &= c.status == ConditionStatus::pass;
    report.conditions.push_back(std::move(c));
  }
  ConditionRecord self_c = poly_condition("self_observer_factor", polys.self_observer, report);
  const bool self_ok = self_c.status == ConditionStatus::pass;
  report.conditions.push_back(std::move(self_c));
  ConditionRecord track_c =
      poly_condition("tracking_factor", theorem2_polynomial(sc.order, sc.gains.k), report);
  const bool track_ok = track_c.status == ConditionStatus::pass;
  report.conditions.push_back(std::move(track_c));

  const ErrorSystemMatrices ems = build_error_matrices(sc.order, sc.gains, gm.H);
  const double eta = 1.0;  // thresholds are invariant under (Q,eta) scaling
  report.values["eta"] = eta;

  auto solve_clause = [&](const std::string& name, const Eigen::MatrixXd& F, bool prereq,
                          const char* prereq_what) -> std::optional<Eigen::MatrixXd> {
    if (!prereq) {
      report.conditions.push_back(
          {name, ConditionStatus::skipped,
           std::string("prerequisite failed: ") + prereq_what});
      return std::nullopt;
    }
    try {
      Eigen::MatrixXd Q = lyapunov_solve(F, eta);
      report.values[name + ".q_norm"] = spectral_norm_sym(Q);
      report.conditions.push_back({name, ConditionStatus::pass,
                                   "solved, ||Q|| = " + fmt(spectral_norm_sym(Q))});
      return Q;
    } catch (const NotHurwitz& e) {
      report.conditions.push_back({name, ConditionStatus::fail, e.what()});
      return std::nullopt;
    }
  };

  const auto Q1 = solve_clause("leader_observer_lyapunov", ems.leader_observer_full,
                               coupling_ok && leader_factors_ok,
                               "leader observer factors or coupling matrix");
  const auto Q2 =
      solve_clause("self_observer_lyapunov", ems.self_observer, self_ok, "self observer factor");
  const auto Q3 =
      solve_clause("tracking_lyapunov", ems.tracking_local, track_ok, "tracking factor");

  const std::vector<double> rho = sc.nonlinearity.lipschitz_constants(sc.order);
  double sum_p0x = 0.0, sum_px = 0.0, prefix = 0.0;
  for (int i = 1; i <= sc.order; ++i) {
    prefix = std::max(prefix, rho[i - 1]);  // spectral norm of the i-th P block
    sum_p0x += prefix;
  }
  prefix = 0.0;
  for (int i = 2; i <= sc.order; ++i) {
    prefix = std::max(prefix, rho[i - 1]);
    sum_px += prefix;
  }

  if (Q1 && Q3) {
    const double bound = std::min(eta / (2.0 * spectral_norm_sym(*Q1)),
                                  eta / (2.0 * spectral_norm_sym(*Q3)));
    report.values["leader_smallgain.sum"] = sum_p0x;
    report.values["leader_smallgain.bound"] = bound;
    report.conditions.push_back({"leader_smallgain",
                                 sum_p0x < bound ? ConditionStatus::pass : ConditionStatus::fail,
                                 fmt(sum_p0x) + " < " + fmt(bound) + " required"});
  } else {
    report.conditions.push_back({"leader_smallgain", ConditionStatus::skipped,
                                 "prerequisite failed: Lyapunov certificates unavailable"});
  }
  if (Q2) {
    const double bound = eta / (2.0 * spectral_norm_sym(*Q2));
    report.values["self_smallgain.sum"] = sum_px;
    report.values["self_smallgain.bound"] = bound;
    report.conditions.push_back({"self_smallgain",
                                 sum_px < bound ? ConditionStatus::pass : ConditionStatus::fail,
                                 fmt(sum_px) + " < " + fmt(bound) + " required"});
  } else {
    report.conditions.push_back({"self_smallgain", ConditionStatus::skipped,
                                 "prerequisite failed: Lyapunov certificate unavailable"});
  }

  if (opts.eta_search && Q1 && Q2 && Q3) {
    // scale invariance makes this a diagnostic: every eta yields the same
    // thresholds up to roundoff, recorded here as evidence
    for (double e : {1e-2, 1e-1, 1e0, 1e1, 1e2}) {
      const Eigen::MatrixXd q1 = lyapunov_solve(ems.leader_observer_full, e);
      const Eigen::MatrixXd q2 = lyapunov_solve(ems.self_observer, e);
      const Eigen::MatrixXd q3 = lyapunov_solve(ems.tracking_local, e);
      const NormConditionResult nc = theorem2_norm_conditions(sc.order, rho, q1, e, q2, e, q3, e);
      std::ostringstream key;
      key << "eta_search[" << fmt(e) << "]";
      report.values[key.str() + ".leader_bound"] = nc.bound_leader;
      report.values[key.str() + ".self_bound"] = nc.bound_self;
    }
  }
  return report;
}

}  // namespace hotrack
