#pragma once

#include <Eigen/Dense>

#include "hotrack/gains.hpp"
#include "hotrack/graph.hpp"
#include "hotrack/models.hpp"
#include "hotrack/observers.hpp"

namespace hotrack {

enum class DynamicsMode { linear, nonlinear };

struct IntegrationSettings {
  double dt = 1e-3;
  double horizon = 40.0;
  SignumMode sgn;
};

// Complete description of one closed-loop run: plant family, communication
// structure, gains, leader input, initial data, and integration settings.
// Everything downstream (simulation, certification, file IO) consumes this.
struct Scenario {
  DynamicsMode mode = DynamicsMode::linear;
  int order = 3;  // state order l per agent; the design requires l >= 3
  Topology topology;
  GainSet gains;
  LeaderInput leader_input;
  Nonlinearity nonlinearity;  // must be Kind::none in linear mode

  // (N+1) x l; row 0 is the leader, row i is follower i
  Eigen::MatrixXd initial_agent_states;
  // observer internals at t=0 (z-variables, estimates are derived)
  Eigen::MatrixXd initial_z0;  // N x (l-1)
  Eigen::MatrixXd initial_z;   // N x (l-1)
  Eigen::VectorXd initial_u_hat;    // N
  Eigen::VectorXd initial_x0_hat1;  // N, used in nonlinear mode only

  IntegrationSettings integration;

  int n_followers() const { return topology.n_followers(); }

  // Default follower spread: first states cycle through {1,-1,2,-2,3}, higher
  // states zero; leader starts at the origin.
  static Eigen::MatrixXd default_initial_states(int n_followers, int order);

  // Fills any empty initial blocks with the documented defaults.
  void apply_initial_defaults();

  // Collects every violation; throws ValidationError if any.
  void validate() const;
  void collect_issues(std::vector<std::string>& issues) const;
};

// Convenience constructor used by tests and bundled files: chain topology
// 1-2-...-N with unit weights and a single leader link b_1 = 1.
Topology chain_topology(int n_followers);

}  // namespace hotrack
