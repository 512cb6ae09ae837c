#include "hotrack/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace hotrack {

namespace {

std::string edge_str(int i, int j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

Topology::Topology(int n_followers, std::vector<Edge> edges, Eigen::VectorXd leader_links)
    : n_(n_followers), edges_(std::move(edges)), b_(std::move(leader_links)) {
  if (n_ < 1) throw IndexOutOfRange("follower count must be positive, got " + std::to_string(n_));
  if (b_.size() != n_)
    throw DimensionMismatch("leader link vector has size " + std::to_string(b_.size()) +
                            ", expected " + std::to_string(n_));
  adj_ = Eigen::MatrixXd::Zero(n_, n_);
  for (const Edge& e : edges_) {
    adj_(e.i - 1, e.j - 1) = e.weight;
    adj_(e.j - 1, e.i - 1) = e.weight;
  }
}

Topology build_topology(int n_followers, const std::vector<Edge>& edges,
                        const std::vector<std::pair<int, double>>& leader_links) {
  if (n_followers < 1)
    throw IndexOutOfRange("follower count must be positive, got " + std::to_string(n_followers));

  std::vector<Edge> canon;
  canon.reserve(edges.size());
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : edges) {
    if (e.i < 1 || e.i > n_followers || e.j < 1 || e.j > n_followers)
      throw IndexOutOfRange("edge " + edge_str(e.i, e.j) + " references a follower outside 1.." +
                            std::to_string(n_followers));
    if (e.i == e.j) throw SelfLoop("edge " + edge_str(e.i, e.j) + " is a self loop");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw NonPositiveWeight("edge " + edge_str(e.i, e.j) + " has non-positive weight " +
                              std::to_string(e.weight));
    Edge c{std::min(e.i, e.j), std::max(e.i, e.j), e.weight};
    if (!seen.insert({c.i, c.j}).second)
      throw DuplicateEdge("edge " + edge_str(c.i, c.j) + " listed more than once");
    canon.push_back(c);
  }

  Eigen::VectorXd b = Eigen::VectorXd::Zero(n_followers);
  std::set<int> seen_links;
  for (const auto& [id, w] : leader_links) {
    if (id < 1 || id > n_followers)
      throw IndexOutOfRange("leader link references follower " + std::to_string(id) +
                            ", outside 1.." + std::to_string(n_followers));
    if (!(w > 0.0) || !std::isfinite(w))
      throw NonPositiveWeight("leader link to follower " + std::to_string(id) +
                              " has non-positive weight " + std::to_string(w));
    if (!seen_links.insert(id).second)
      throw DuplicateEdge("leader link to follower " + std::to_string(id) +
                          " listed more than once");
    b(id - 1) = w;
  }

  return Topology(n_followers, std::move(canon), std::move(b));
}

GraphMatrices graph_matrices(const Topology& t) {
  const int n = t.n_followers();
  const Eigen::MatrixXd& a = t.adjacency();

  GraphMatrices m;
  m.L = -a;
  m.L.diagonal() = a.rowwise().sum();
  m.B = t.leader_links().asDiagonal();
  m.H = m.L + m.B;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.H);
  if (es.info() != Eigen::Success)
    throw Error("eigensolver failed on coupling matrix of size " + std::to_string(n));
  m.h_eigenvalues = es.eigenvalues();  // ascending
  return m;
}

bool leader_globally_reachable(const Topology& t) {
  const int n = t.n_followers();
  std::vector<char> reached(n, 0);
  std::vector<int> queue;
  for (int i = 0; i < n; ++i)
    if (t.leader_links()(i) > 0.0) {
      reached[i] = 1;
      queue.push_back(i);
    }
  const Eigen::MatrixXd& a = t.adjacency();
  while (!queue.empty()) {
    int i = queue.back();
    queue.pop_back();
    for (int j = 0; j < n; ++j)
      if (a(i, j) > 0.0 && !reached[j]) {
        reached[j] = 1;
        queue.push_back(j);
      }
  }
  return std::all_of(reached.begin(), reached.end(), [](char c) { return c != 0; });
}

}  // namespace hotrack
