#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hotrack/errors.hpp"

namespace hotrack {

// Undirected weighted edge between followers. Ids are 1-based (follower 1..N);
// stored canonically with i < j.
struct Edge {
  int i = 0;
  int j = 0;
  double weight = 1.0;
};

// Follower communication graph plus the leader links b_i. The leader itself is
// not a node here; it only appears through b. All-zero b is representable (the
// coupling matrix is then merely positive semidefinite), but a tracking
// scenario requires at least one informed follower.
class Topology {
 public:
  // single informed follower; the smallest valid tracking layout
  Topology() : Topology(1, {}, Eigen::VectorXd::Ones(1)) {}
  Topology(int n_followers, std::vector<Edge> edges, Eigen::VectorXd leader_links);

  int n_followers() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  // b_i, 0-based: leader_links()(i) is the link weight of follower i+1
  const Eigen::VectorXd& leader_links() const { return b_; }
  // dense symmetric adjacency of the follower graph, zero diagonal
  const Eigen::MatrixXd& adjacency() const { return adj_; }

  bool has_informed_follower() const { return (b_.array() > 0.0).any(); }

 private:
  int n_;
  std::vector<Edge> edges_;
  Eigen::VectorXd b_;
  Eigen::MatrixXd adj_;
};

// Validates and canonicalizes. Edge ids and leader-link ids are 1-based.
// Throws IndexOutOfRange, SelfLoop, NonPositiveWeight, DuplicateEdge.
Topology build_topology(int n_followers, const std::vector<Edge>& edges,
                        const std::vector<std::pair<int, double>>& leader_links);

struct GraphMatrices {
  Eigen::MatrixXd L;  // follower Laplacian, rows sum to zero
  Eigen::MatrixXd B;  // diag(b_i)
  Eigen::MatrixXd H;  // L + B
  Eigen::VectorXd h_eigenvalues;  // ascending, real (H symmetric)

  bool positive_definite(double tol = 1e-9) const {
    return h_eigenvalues.size() > 0 && h_eigenvalues(0) > tol;
  }
};

GraphMatrices graph_matrices(const Topology& t);

// true iff every follower is reachable from the leader through leader links
// followed by follower-follower edges
bool leader_globally_reachable(const Topology& t);

}  // namespace hotrack
