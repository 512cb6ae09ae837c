#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "hotrack/graph.hpp"

using namespace hotrack;

TEST_CASE("single informed follower") {
  const Topology t = build_topology(1, {}, {{1, 1.0}});
  CHECK(t.n_followers() == 1);
  CHECK(t.leader_links()(0) == 1.0);
  CHECK(t.has_informed_follower());

  const GraphMatrices g = graph_matrices(t);
  CHECK(g.L(0, 0) == 0.0);
  CHECK(g.B(0, 0) == 1.0);
  CHECK(g.H(0, 0) == 1.0);
  CHECK(g.h_eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.positive_definite());
}

TEST_CASE("smallest connected pair") {
  const Topology t = build_topology(2, {{1, 2, 1.0}}, {{1, 1.0}});
  const GraphMatrices g = graph_matrices(t);

  Eigen::MatrixXd want(2, 2);
  want << 2.0, -1.0, -1.0, 1.0;
  CHECK((g.H - want).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));

  const double s5 = std::sqrt(5.0);
  CHECK(g.h_eigenvalues(0) == doctest::Approx((3.0 - s5) / 2.0).epsilon(1e-12));
  CHECK(g.h_eigenvalues(1) == doctest::Approx((3.0 + s5) / 2.0).epsilon(1e-12));
  CHECK(g.positive_definite());
}

TEST_CASE("uninformed pair is only semidefinite") {
  const Topology t = build_topology(2, {{1, 2, 1.0}}, {});
  CHECK_FALSE(t.has_informed_follower());
  const GraphMatrices g = graph_matrices(t);
  CHECK(std::abs(g.h_eigenvalues(0)) < 1e-12);
  CHECK_FALSE(g.positive_definite());
}

TEST_CASE("five-follower chain") {
  const Topology t = chain_topology(5);
  const GraphMatrices g = graph_matrices(t);

  CHECK((g.L.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((g.L - g.L.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((g.H - (g.L + g.B)).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i + 1 < 5; ++i) CHECK(g.h_eigenvalues(i) <= g.h_eigenvalues(i + 1));
  CHECK(g.positive_definite());
  // extreme coupling eigenvalues of this benchmark stand-in, frozen from an
  // independent characteristic-polynomial evaluation
  CHECK(g.h_eigenvalues(0) == doctest::Approx(0.08101405277100530).epsilon(1e-10));
  CHECK(g.h_eigenvalues(4) == doctest::Approx(3.68250706566236).epsilon(1e-10));
}

TEST_CASE("validation failures") {
  CHECK_THROWS_AS(build_topology(0, {}, {}), IndexOutOfRange);
  CHECK_THROWS_AS(build_topology(2, {{0, 1, 1.0}}, {{1, 1.0}}), IndexOutOfRange);
  CHECK_THROWS_AS(build_topology(2, {{1, 3, 1.0}}, {{1, 1.0}}), IndexOutOfRange);
  CHECK_THROWS_AS(build_topology(2, {{2, 2, 1.0}}, {{1, 1.0}}), SelfLoop);
  CHECK_THROWS_AS(build_topology(2, {{1, 2, 0.0}}, {{1, 1.0}}), NonPositiveWeight);
  CHECK_THROWS_AS(build_topology(2, {{1, 2, -2.0}}, {{1, 1.0}}), NonPositiveWeight);
  CHECK_THROWS_AS(build_topology(2, {{1, 2, 1.0}, {2, 1, 3.0}}, {{1, 1.0}}), DuplicateEdge);
  CHECK_THROWS_AS(build_topology(2, {}, {{1, 1.0}, {1, 2.0}}), DuplicateEdge);
  CHECK_THROWS_AS(build_topology(2, {}, {{3, 1.0}}), IndexOutOfRange);
  CHECK_THROWS_AS(build_topology(2, {}, {{1, 0.0}}), NonPositiveWeight);
}

TEST_CASE("edges canonicalized, adjacency symmetric") {
  const Topology t = build_topology(3, {{3, 1, 2.5}}, {{2, 1.0}});
  CHECK(t.edges().size() == 1);
  CHECK(t.edges()[0].i == 1);
  CHECK(t.edges()[0].j == 3);
  CHECK(t.adjacency()(0, 2) == 2.5);
  CHECK(t.adjacency()(2, 0) == 2.5);
  CHECK(t.adjacency()(0, 0) == 0.0);
  CHECK(t.adjacency()(0, 1) == 0.0);
}

TEST_CASE("leader reachability") {
  CHECK(leader_globally_reachable(chain_topology(5)));

  // components {1,2} and {3}; only the first is informed
  const Topology split = build_topology(3, {{1, 2, 1.0}}, {{1, 1.0}});
  CHECK_FALSE(leader_globally_reachable(split));

  // no follower edges but both followers informed directly
  const Topology direct = build_topology(2, {}, {{1, 1.0}, {2, 1.0}});
  CHECK(leader_globally_reachable(direct));
}

TEST_CASE("random connected topologies are positive definite") {
  std::mt19937 rng(7u);
  for (int trial = 0; trial < 25; ++trial) {
    std::uniform_int_distribution<int> size(1, 6);
    const Topology t = testing::random_topology(rng, size(rng));
    const GraphMatrices g = graph_matrices(t);
    CHECK((g.H - g.H.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(leader_globally_reachable(t));
    CHECK(g.positive_definite());
  }
}
