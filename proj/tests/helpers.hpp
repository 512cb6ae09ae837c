#pragma once

// Shared fixtures and independent oracles. Everything here is deliberately
// written from the defining formulas, not by calling the library's own
// assembly paths, so tests compare two independent derivations.

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "hotrack/scenario.hpp"

namespace testing {

inline Eigen::MatrixXd expm(const Eigen::MatrixXd& A) { return A.exp(); }

// Greedy nearest-pair matching between two equal-size complex multisets;
// returns the largest matched distance (infinity on size mismatch).
inline double multiset_distance(std::vector<std::complex<double>> a,
                                std::vector<std::complex<double>> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  std::vector<bool> used(b.size(), false);
  for (const auto& va : a) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double dj = std::abs(va - b[j]);
      if (dj < best_d) {
        best_d = dj;
        best = static_cast<int>(j);
      }
    }
    used[static_cast<size_t>(best)] = true;
    worst = std::max(worst, best_d);
  }
  return worst;
}

inline std::vector<std::complex<double>> eigenvalues_of(const Eigen::MatrixXd& m) {
  const Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  std::vector<std::complex<double>> out(static_cast<size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<size_t>(i)] = es.eigenvalues()(i);
  return out;
}

// Connected follower graph: random spanning tree plus optional extra edges,
// weights in [0.5, 2], at least one leader link.
inline hotrack::Topology random_topology(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> weight(0.5, 2.0);
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<hotrack::Edge> edges;
  for (int v = 2; v <= n; ++v) {
    std::uniform_int_distribution<int> parent(1, v - 1);
    edges.push_back({parent(rng), v, weight(rng)});
  }
  for (int i = 1; i <= n && n > 2; ++i) {
    const int j = 1 + (i + 1) % n;
    if (coin(rng) == 0 || i == j) continue;
    const auto [lo, hi] = std::minmax(i, j);
    const bool dup = std::any_of(edges.begin(), edges.end(), [&](const hotrack::Edge& e) {
      return std::minmax(e.i, e.j) == std::minmax(lo, hi);
    });
    if (!dup) edges.push_back({lo, hi, weight(rng)});
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  std::uniform_int_distribution<int> pick(0, n - 1);
  const int informed = pick(rng);
  for (int i = 0; i < n; ++i)
    if (i == informed || coin(rng) == 0) b(i) = weight(rng);
  std::vector<std::pair<int, double>> links;
  for (int i = 0; i < n; ++i)
    if (b(i) > 0.0) links.emplace_back(i + 1, b(i));
  return hotrack::build_topology(n, edges, links);
}

inline hotrack::GainSet random_gains(std::mt19937& rng, int l, int n) {
  std::uniform_real_distribution<double> g(0.5, 6.0);
  hotrack::GainSet gains;
  gains.k = Eigen::VectorXd::NullaryExpr(l, [&](Eigen::Index) { return g(rng); });
  gains.c0 = Eigen::VectorXd::NullaryExpr(l, [&](Eigen::Index) { return g(rng); });
  gains.r = Eigen::VectorXd::NullaryExpr(l - 1, [&](Eigen::Index) { return g(rng); });
  gains.tau = Eigen::VectorXd::Ones(n);
  gains.d0 = Eigen::VectorXd::Constant(n, 0.1);
  return gains;
}

// Random Hurwitz matrix: random entries shifted left of the imaginary axis.
inline Eigen::MatrixXd random_hurwitz(std::mt19937& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd f = Eigen::MatrixXd::NullaryExpr(n, n, [&](Eigen::Index, Eigen::Index) {
    return gauss(rng);
  });
  double max_re = -std::numeric_limits<double>::infinity();
  for (const auto& ev : eigenvalues_of(f)) max_re = std::max(max_re, ev.real());
  f -= (max_re + 0.3) * Eigen::MatrixXd::Identity(n, n);
  return f;
}

// Benchmark gain set: k=(3,3,3), c0=(5,5,5), r=(4,4).
inline hotrack::GainSet benchmark_gains(int n) {
  hotrack::GainSet g;
  g.k = Eigen::VectorXd::Constant(3, 3.0);
  g.c0 = Eigen::VectorXd::Constant(3, 5.0);
  g.r = Eigen::VectorXd::Constant(2, 4.0);
  g.tau = Eigen::VectorXd::Constant(n, 3.0);
  g.d0 = Eigen::VectorXd::Constant(n, 0.1);
  return g;
}

// Linear two-follower chain scenario whose leader rests at the origin with
// zero input; observer internals chosen consistent (all estimation errors
// start at zero), so the tracking error runs the homogeneous dynamics.
inline hotrack::Scenario linear_pair_resting_leader() {
  hotrack::Scenario sc;
  sc.mode = hotrack::DynamicsMode::linear;
  sc.order = 3;
  sc.topology = hotrack::chain_topology(2);
  sc.gains = benchmark_gains(2);
  sc.leader_input = hotrack::LeaderInput::zero();
  sc.initial_agent_states = Eigen::MatrixXd::Zero(3, 3);
  sc.initial_agent_states.row(1) << 1.0, -0.5, 0.25;
  sc.initial_agent_states.row(2) << -1.0, 0.75, 0.5;
  // z consistent with exact self estimates: z_m = x_m - r_m xhat_{m-1}
  sc.initial_z.resize(2, 2);
  for (int i = 0; i < 2; ++i) {
    const double x1 = sc.initial_agent_states(i + 1, 0);
    const double x2 = sc.initial_agent_states(i + 1, 1);
    const double x3 = sc.initial_agent_states(i + 1, 2);
    sc.initial_z(i, 0) = x2 - sc.gains.rm(2) * x1;
    sc.initial_z(i, 1) = x3 - sc.gains.rm(3) * x2;
  }
  sc.initial_z0 = Eigen::MatrixXd::Zero(2, 2);  // exact: leader states are zero
  sc.initial_u_hat = Eigen::VectorXd::Zero(2);
  sc.initial_x0_hat1 = Eigen::VectorXd::Zero(2);
  sc.integration.dt = 1e-3;
  sc.integration.horizon = 5.0;
  return sc;
}

inline hotrack::Scenario benchmark_nonlinear_chain5() {
  hotrack::Scenario sc;
  sc.mode = hotrack::DynamicsMode::nonlinear;
  sc.order = 3;
  sc.topology = hotrack::chain_topology(5);
  sc.gains = benchmark_gains(5);
  sc.leader_input = hotrack::LeaderInput::sinusoid(1.0, 0.2 * M_PI);
  sc.nonlinearity = hotrack::Nonlinearity::cosine_sum();
  sc.apply_initial_defaults();
  sc.integration.dt = 1e-3;
  sc.integration.horizon = 40.0;
  return sc;
}

}  // namespace testing
