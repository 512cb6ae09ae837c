#include "hotrack/scenario.hpp"

#include <cmath>
#include <string>

namespace hotrack {

void GainSet::collect_issues(int l, int n_followers, std::vector<std::string>& issues) const {
  auto check_vec = [&](const Eigen::VectorXd& v, const char* name, int want) {
    if (v.size() != want) {
      issues.push_back("gains: " + std::string(name) + " has " + std::to_string(v.size()) +
                       " entries, expected " + std::to_string(want));
      return;
    }
    for (Eigen::Index i = 0; i < v.size(); ++i)
      if (!(v(i) > 0.0) || !std::isfinite(v(i)))
        issues.push_back("gains: " + std::string(name) + "[" + std::to_string(i + 1) +
                         "] must be strictly positive and finite");
  };
  check_vec(k, "k", l);
  check_vec(c0, "c0", l);
  check_vec(r, "r", l - 1);
  check_vec(tau, "tau", n_followers);
  check_vec(d0, "d0", n_followers);
}

void GainSet::validate(int l, int n_followers) const {
  std::vector<std::string> issues;
  collect_issues(l, n_followers, issues);
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

Eigen::MatrixXd Scenario::default_initial_states(int n_followers, int order) {
  static constexpr double spread[5] = {1.0, -1.0, 2.0, -2.0, 3.0};
  Eigen::MatrixXd x0 = Eigen::MatrixXd::Zero(n_followers + 1, order);
  for (int i = 1; i <= n_followers; ++i) x0(i, 0) = spread[(i - 1) % 5];
  return x0;
}

void Scenario::apply_initial_defaults() {
  const int n = n_followers();
  if (initial_agent_states.size() == 0)
    initial_agent_states = default_initial_states(n, order);
  if (initial_z0.size() == 0) initial_z0 = Eigen::MatrixXd::Zero(n, order - 1);
  if (initial_z.size() == 0) initial_z = Eigen::MatrixXd::Zero(n, order - 1);
  if (initial_u_hat.size() == 0) initial_u_hat = Eigen::VectorXd::Zero(n);
  if (initial_x0_hat1.size() == 0) initial_x0_hat1 = Eigen::VectorXd::Zero(n);
}

void Scenario::collect_issues(std::vector<std::string>& issues) const {
  const int n = n_followers();

  if (order < 3)
    issues.push_back("system: state order must be at least 3, got " + std::to_string(order));

  if (!topology.has_informed_follower())
    issues.push_back("topology: no leader link is positive; the leader informs nobody");

  gains.collect_issues(order, n, issues);

  if (mode == DynamicsMode::linear && nonlinearity.kind() != Nonlinearity::Kind::none)
    issues.push_back("nonlinearity: linear mode requires kind none");

  if (initial_agent_states.rows() != n + 1 || initial_agent_states.cols() != order)
    issues.push_back("initial_conditions: agent state block must be (N+1) x l");
  else if (!initial_agent_states.allFinite())
    issues.push_back("initial_conditions: agent states must be finite");

  auto check_block = [&](const Eigen::MatrixXd& m, const char* name, int rows, int cols) {
    if (m.rows() != rows || m.cols() != cols)
      issues.push_back("initial_conditions: " + std::string(name) + " must be " +
                       std::to_string(rows) + " x " + std::to_string(cols));
    else if (!m.allFinite())
      issues.push_back("initial_conditions: " + std::string(name) + " must be finite");
  };
  check_block(initial_z0, "z0", n, order - 1);
  check_block(initial_z, "z", n, order - 1);
  if (initial_u_hat.size() != n || !initial_u_hat.allFinite())
    issues.push_back("initial_conditions: u_hat must be a finite vector of size N");
  if (initial_x0_hat1.size() != n || !initial_x0_hat1.allFinite())
    issues.push_back("initial_conditions: x0_hat1 must be a finite vector of size N");

  if (!(integration.dt > 0.0) || !std::isfinite(integration.dt))
    issues.push_back("integration: dt must be positive and finite");
  else if (!(integration.horizon >= integration.dt) || !std::isfinite(integration.horizon))
    issues.push_back("integration: horizon must be finite and at least one step long");
  if (integration.sgn.kind == SignumMode::Kind::boundary_layer &&
      (!(integration.sgn.epsilon > 0.0) || !std::isfinite(integration.sgn.epsilon)))
    issues.push_back("integration: boundary layer width must be positive");

  // table-kind leader inputs must cover the whole run, including the half-step
  // stage evaluations of the integrator
  if (const auto* tab = std::get_if<LeaderInput::Table>(&leader_input.shape)) {
    if (tab->spline.t_min() > 0.0 || tab->spline.t_max() < integration.horizon)
      issues.push_back("leader_input: table must cover [0, horizon]");
  }
}

void Scenario::validate() const {
  std::vector<std::string> issues;
  collect_issues(issues);
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

Topology chain_topology(int n_followers) {
  std::vector<Edge> edges;
  for (int i = 1; i < n_followers; ++i) edges.push_back({i, i + 1, 1.0});
  return build_topology(n_followers, edges, {{1, 1.0}});
}

}  // namespace hotrack
