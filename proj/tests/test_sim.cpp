#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "helpers.hpp"
#include "hotrack/integrator.hpp"
#include "hotrack/sim.hpp"
#include "hotrack/stability.hpp"

using namespace hotrack;

namespace {

// Single-follower scenario with every state block nonzero; the workhorse for
// the whole-loop oracle comparisons below.
Scenario single_follower_scenario(DynamicsMode mode) {
  Scenario sc;
  sc.mode = mode;
  sc.order = 3;
  sc.topology = build_topology(1, {}, {{1, 1.0}});
  sc.gains = testing::benchmark_gains(1);
  sc.leader_input = LeaderInput::sinusoid(1.0, 0.63);
  if (mode == DynamicsMode::nonlinear) sc.nonlinearity = Nonlinearity::cosine_sum();
  sc.initial_agent_states.resize(2, 3);
  sc.initial_agent_states.row(0) << 0.1, 0.2, -0.1;
  sc.initial_agent_states.row(1) << 1.0, 0.0, 0.0;
  sc.initial_z0.resize(1, 2);
  sc.initial_z0 << 0.05, -0.02;
  sc.initial_z.resize(1, 2);
  sc.initial_z << 0.4, 0.1;
  sc.initial_u_hat = Eigen::VectorXd::Constant(1, 0.3);
  sc.initial_x0_hat1 = Eigen::VectorXd::Constant(1, -0.15);
  sc.integration.dt = 1e-3;
  sc.integration.horizon = 0.2;
  return sc;
}

Scenario all_zero_pair() {
  Scenario sc;
  sc.mode = DynamicsMode::linear;
  sc.order = 3;
  sc.topology = chain_topology(2);
  sc.gains = testing::benchmark_gains(2);
  sc.leader_input = LeaderInput::zero();
  sc.initial_agent_states = Eigen::MatrixXd::Zero(3, 3);
  sc.initial_z0 = Eigen::MatrixXd::Zero(2, 2);
  sc.initial_z = Eigen::MatrixXd::Zero(2, 2);
  sc.initial_u_hat = Eigen::VectorXd::Zero(2);
  sc.initial_x0_hat1 = Eigen::VectorXd::Zero(2);
  sc.integration.dt = 1e-2;
  sc.integration.horizon = 1.0;
  return sc;
}

using Rhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

// plain RK4 written out locally so the oracle shares nothing with the library
Eigen::VectorXd oracle_rk4(const Rhs& rhs, double t, const Eigen::VectorXd& y, double h) {
  const Eigen::VectorXd k1 = rhs(t, y);
  const Eigen::VectorXd k2 = rhs(t + h / 2, y + (h / 2) * k1);
  const Eigen::VectorXd k3 = rhs(t + h / 2, y + (h / 2) * k2);
  const Eigen::VectorXd k4 = rhs(t + h, y + h * k3);
  return y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

double f1(double a) { return std::cos(a); }
double f2(double a, double b) { return std::cos(a) + std::cos(b); }
double f3(double a, double b, double c) { return std::cos(a) + std::cos(b) + std::cos(c); }

}  // namespace

TEST_CASE("state layout offsets") {
  Scenario sc = testing::benchmark_nonlinear_chain5();
  sc.topology = chain_topology(2);
  sc.gains = testing::benchmark_gains(2);
  sc.apply_initial_defaults();

  StateLayout lay = StateLayout::for_scenario(sc);
  CHECK(lay.n == 2);
  CHECK(lay.order == 3);
  CHECK(lay.has_x0_hat1);
  CHECK(lay.dim() == 23);
  CHECK(lay.agent(0) == 0);
  CHECK(lay.agent(2) == 6);
  CHECK(lay.u_hat() == 9);
  CHECK(lay.d() == 11);
  CHECK(lay.z0() == 13);
  CHECK(lay.x0_hat1() == 17);
  CHECK(lay.z() == 19);

  sc.mode = DynamicsMode::linear;
  lay = StateLayout::for_scenario(sc);
  CHECK_FALSE(lay.has_x0_hat1);
  CHECK(lay.dim() == 21);
  CHECK(lay.z() == 17);
}

TEST_CASE("default initial spread cycles the follower first states") {
  const Eigen::MatrixXd init = Scenario::default_initial_states(7, 3);
  REQUIRE(init.rows() == 8);
  REQUIRE(init.cols() == 3);
  CHECK(init.row(0).isZero(0.0));
  const double expect[] = {1.0, -1.0, 2.0, -2.0, 3.0, 1.0, -1.0};
  for (int i = 1; i <= 7; ++i) {
    CHECK(init(i, 0) == expect[i - 1]);
    CHECK(init(i, 1) == 0.0);
    CHECK(init(i, 2) == 0.0);
  }
}

TEST_CASE("initial state packing") {
  const Scenario sc = testing::benchmark_nonlinear_chain5();
  const StateLayout lay = StateLayout::for_scenario(sc);
  const Eigen::VectorXd y = initial_state(sc, lay);
  REQUIRE(y.size() == lay.dim());
  CHECK(y.segment(lay.agent(0), 3).isZero(0.0));
  CHECK(y(lay.agent(1)) == 1.0);
  CHECK(y(lay.agent(2)) == -1.0);
  CHECK(y(lay.agent(5)) == 3.0);
  CHECK(y.segment(lay.u_hat(), 5).isZero(0.0));
  CHECK((y.segment(lay.d(), 5).array() == 0.1).all());
  CHECK(y.segment(lay.z0(), 10).isZero(0.0));
  CHECK(y.segment(lay.x0_hat1(), 5).isZero(0.0));
  CHECK(y.segment(lay.z(), 10).isZero(0.0));
}

TEST_CASE("the all-zero closed loop is an equilibrium") {
  const Scenario sc = all_zero_pair();
  const StateLayout lay = StateLayout::for_scenario(sc);
  const Eigen::VectorXd y = Eigen::VectorXd::Zero(lay.dim());
  const ClosedLoopEval eval = closed_loop_derivative(sc, lay, 0.0, y);
  CHECK(eval.dy.isZero(0.0));
  CHECK(eval.controls.isZero(0.0));
  CHECK(eval.u0 == 0.0);

  Scenario with_d0 = sc;  // d stays at d0 but feeds nothing when psi = 0
  const TraceLog log = integrate(with_d0);
  CHECK(log.error_sup.maxCoeff() == 0.0);
  CHECK(log.states.rightCols(lay.dim() - lay.u_hat()).cwiseAbs().maxCoeff() ==
        doctest::Approx(0.1).epsilon(1e-15));  // only the adaptive gains are nonzero
}

TEST_CASE("closed-loop derivative guards") {
  const Scenario sc = all_zero_pair();
  const StateLayout lay = StateLayout::for_scenario(sc);
  CHECK_THROWS_AS(closed_loop_derivative(sc, lay, 0.0, Eigen::VectorXd::Zero(5)),
                  DimensionMismatch);
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(lay.dim());
  bad(3) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(closed_loop_derivative(sc, lay, 0.0, bad), NonFiniteState);
}

TEST_CASE("nonlinear drift terms reach every derivative block") {
  Scenario sc = single_follower_scenario(DynamicsMode::nonlinear);
  sc.initial_agent_states.setZero();
  sc.initial_z0.setZero();
  sc.initial_z.setZero();
  sc.initial_u_hat.setZero();
  sc.initial_x0_hat1.setZero();
  const StateLayout lay = StateLayout::for_scenario(sc);
  const ClosedLoopEval eval = closed_loop_derivative(sc, lay, 0.0, initial_state(sc, lay));
  // leader rows pick up the cosine ladder 1, 2, 3; so does the follower at u=0
  CHECK(eval.dy(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval.dy(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(eval.dy(2) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(eval.controls(0) == 0.0);
  CHECK(eval.dy(lay.agent(1) + 2) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("rk4 step reproduces the quartic Taylor polynomial") {
  auto rhs = [](double, const Eigen::VectorXd& y) { return (-y).eval(); };
  const Eigen::VectorXd y0 = Eigen::VectorXd::Ones(1);
  const Eigen::VectorXd y1 = rk4_step(rhs, 0.0, y0, 0.1);
  const double h = 0.1;
  const double taylor = 1.0 - h + h * h / 2 - h * h * h / 6 + h * h * h * h / 24;
  CHECK(y1(0) == doctest::Approx(taylor).epsilon(1e-15));
  CHECK(std::abs(y1(0) - std::exp(-0.1)) < 1e-7);
}

TEST_CASE("whole-loop integration matches a hand-written single-follower oracle") {
  // 12 equations written straight from the design, no library modules involved
  Scenario sc = single_follower_scenario(DynamicsMode::linear);
  const double k1 = 3.0, k2 = 3.0, k3 = 3.0, c2 = 5.0, c3 = 5.0, r2 = 4.0, r3 = 4.0;
  const double tau = sc.gains.tau(0);

  Rhs rhs = [&](double t, const Eigen::VectorXd& y) {
    const double u0 = std::sin(0.63 * t);
    const double x01 = y(0), x02 = y(1), x03 = y(2);
    const double x1 = y(3), x2 = y(4), x3 = y(5);
    const double uh = y(6), d = y(7);
    const double za = y(8), zb = y(9), wa = y(10), wb = y(11);
    const double xh02 = za + c2 * x01, xh03 = zb + c3 * xh02;
    const double xh2 = wa + r2 * x1, xh3 = wb + r3 * xh2;
    const double u = -k1 * (x1 - x01) - k2 * (xh2 - xh02) - k3 * (xh3 - xh03) + uh;
    const double psi = uh - u0;
    const double sg = psi > 0 ? 1.0 : (psi < 0 ? -1.0 : 0.0);
    Eigen::VectorXd dy(12);
    dy << x02, x03, u0, x2, x3, u, -psi - d * sg, tau * std::abs(psi),
        -c2 * za - c2 * c2 * x01 + xh03, -c3 * zb - c3 * c3 * xh02 + uh,
        -r2 * wa - r2 * r2 * x1 + xh3, -r3 * wb - r3 * r3 * xh2 + u;
    return dy;
  };

  Eigen::VectorXd y(12);
  y << 0.1, 0.2, -0.1, 1.0, 0.0, 0.0, 0.3, 0.1, 0.05, -0.02, 0.4, 0.1;
  const int steps = 200;
  for (int k = 0; k < steps; ++k) y = oracle_rk4(rhs, k * 1e-3, y, 1e-3);

  const TraceLog log = integrate(sc);
  REQUIRE(log.rows() == steps + 1);
  const Eigen::VectorXd lib = log.states.row(steps).transpose();
  REQUIRE(lib.size() == 12);
  for (int i = 0; i < 12; ++i) CHECK(lib(i) == doctest::Approx(y(i)).epsilon(1e-10));
}

TEST_CASE("whole-loop integration matches the oracle with drift and a boundary layer") {
  Scenario sc = single_follower_scenario(DynamicsMode::nonlinear);
  sc.integration.sgn = {SignumMode::Kind::boundary_layer, 1e-2};
  const double k1 = 3.0, k2 = 3.0, k3 = 3.0, c1 = 5.0, c2 = 5.0, c3 = 5.0;
  const double r2 = 4.0, r3 = 4.0;
  const double tau = sc.gains.tau(0);

  Rhs rhs = [&](double t, const Eigen::VectorXd& y) {
    const double u0 = std::sin(0.63 * t);
    const double x01 = y(0), x02 = y(1), x03 = y(2);
    const double x1 = y(3), x2 = y(4), x3 = y(5);
    const double uh = y(6), d = y(7);
    const double za = y(8), zb = y(9), xh01 = y(10), wa = y(11), wb = y(12);
    const double xh02 = za + c2 * x01, xh03 = zb + c3 * xh02;
    const double xh2 = wa + r2 * x1, xh3 = wb + r3 * xh2;
    const double u = -k1 * (x1 - xh01) - k2 * (xh2 - xh02) - k3 * (xh3 - xh03) + uh;
    const double psi = uh - u0;
    Eigen::VectorXd dy(13);
    dy << x02 + f1(x01), x03 + f2(x01, x02), u0 + f3(x01, x02, x03),  //
        x2 + f1(x1), x3 + f2(x1, x2), u + f3(x1, x2, x3),             //
        -psi - d * std::tanh(psi / 1e-2), tau * std::abs(psi),        //
        -c2 * za - c2 * c2 * x01 + xh03 + f2(xh01, xh02) - c2 * f1(x01),
        -c3 * zb - c3 * c3 * xh02 + uh + f3(xh01, xh02, xh03) - c3 * f2(xh01, xh02),
        -c1 * (xh01 - x01) + xh02 + f1(xh01),
        -r2 * wa - r2 * r2 * x1 + xh3 + f2(x1, xh2) - r2 * f1(x1),
        -r3 * wb - r3 * r3 * xh2 + u + f3(x1, xh2, xh3) - r3 * f2(x1, xh2);
    return dy;
  };

  Eigen::VectorXd y(13);
  y << 0.1, 0.2, -0.1, 1.0, 0.0, 0.0, 0.3, 0.1, 0.05, -0.02, -0.15, 0.4, 0.1;
  const int steps = 200;
  for (int k = 0; k < steps; ++k) y = oracle_rk4(rhs, k * 1e-3, y, 1e-3);

  const TraceLog log = integrate(sc);
  const Eigen::VectorXd lib = log.states.row(steps).transpose();
  REQUIRE(lib.size() == 13);
  CHECK(lib(0) == doctest::Approx(y(0)).epsilon(1e-10));   // x0_1
  CHECK(lib(3) == doctest::Approx(y(3)).epsilon(1e-10));   // x_1
  CHECK(lib(6) == doctest::Approx(y(6)).epsilon(1e-10));   // u_hat
  CHECK(lib(7) == doctest::Approx(y(7)).epsilon(1e-10));   // d
  CHECK(lib(8) == doctest::Approx(y(8)).epsilon(1e-10));   // z0_2
  CHECK(lib(9) == doctest::Approx(y(9)).epsilon(1e-10));   // z0_3
  CHECK(lib(10) == doctest::Approx(y(10)).epsilon(1e-10)); // x0_hat1
  CHECK(lib(11) == doctest::Approx(y(11)).epsilon(1e-10)); // z_2
  CHECK(lib(12) == doctest::Approx(y(12)).epsilon(1e-10)); // z_3
}

TEST_CASE("integration error falls fourth order in the step") {
  Scenario sc = single_follower_scenario(DynamicsMode::linear);
  sc.leader_input = LeaderInput::zero();
  sc.initial_u_hat.setZero();  // exact input estimate: switching stays silent
  sc.integration.horizon = 1.0;

  auto final_state = [&](double dt) {
    Scenario run = sc;
    run.integration.dt = dt;
    const TraceLog log = integrate(run);
    return Eigen::VectorXd(log.states.row(log.rows() - 1).transpose());
  };

  const Eigen::VectorXd ref = final_state(5e-4);
  const double e1 = (final_state(8e-3) - ref).cwiseAbs().maxCoeff();
  const double e2 = (final_state(4e-3) - ref).cwiseAbs().maxCoeff();
  const double e3 = (final_state(2e-3) - ref).cwiseAbs().maxCoeff();
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.25));
  CHECK(e2 / e3 == doctest::Approx(16.0).epsilon(0.25));
}

TEST_CASE("integration is deterministic") {
  const Scenario sc = single_follower_scenario(DynamicsMode::nonlinear);
  const TraceLog a = integrate(sc);
  const TraceLog b = integrate(sc);
  CHECK((a.states.array() == b.states.array()).all());
  CHECK((a.controls.array() == b.controls.array()).all());
  CHECK((a.error_sup.array() == b.error_sup.array()).all());
}

TEST_CASE("runaway gains raise a divergence error with a timestamp") {
  Scenario sc = single_follower_scenario(DynamicsMode::linear);
  sc.gains.k << 100.0, 1.0, 1.0;  // tracking factor has roots in the right half plane
  sc.integration.horizon = 20.0;
  try {
    integrate(sc);
    FAIL("expected divergence");
  } catch (const Diverged& e) {
    CHECK(e.t > 0.0);
    CHECK(e.t < 20.0);
  }
}

TEST_CASE("invalid settings are rejected before any stepping") {
  Scenario sc = single_follower_scenario(DynamicsMode::linear);
  sc.integration.dt = -1e-3;
  CHECK_THROWS_AS(integrate(sc), ValidationError);
}

TEST_CASE("consistent internals pin the error signals to their reduced dynamics") {
  // exact estimates and a resting leader: input / observer errors must stay on
  // their invariant zero manifolds while the tracking error contracts exactly
  // like its stacked linear system
  Scenario sc = testing::linear_pair_resting_leader();
  sc.integration.horizon = 1.0;
  const TraceLog log = integrate(sc);
  const int last = log.rows() - 1;

  CHECK(log.error_sup.col(0).maxCoeff() < 1e-12);  // input estimate
  CHECK(log.error_sup.col(1).maxCoeff() < 1e-12);  // leader-state estimate
  CHECK(log.error_sup.col(2).maxCoeff() < 1e-12);  // self-state estimate

  const GraphMatrices gm = graph_matrices(sc.topology);
  const ErrorSystemMatrices ems = build_error_matrices(sc.order, sc.gains, gm.H);
  const Eigen::VectorXd e0 = log.errors_at(0).tracking;
  const Eigen::VectorXd eT = log.errors_at(last).tracking;
  const Eigen::VectorXd predicted = testing::expm(ems.tracking_consensus * 1.0) * e0;
  CHECK((eT - predicted).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("perturbed self observer contracts along its own stacked system") {
  Scenario sc = testing::linear_pair_resting_leader();
  sc.integration.horizon = 1.0;
  sc.initial_z(0, 0) += 0.3;  // push the self-state error off its zero manifold
  sc.initial_z(1, 1) -= 0.2;
  const TraceLog log = integrate(sc);
  const int last = log.rows() - 1;

  const GraphMatrices gm = graph_matrices(sc.topology);
  const ErrorSystemMatrices ems = build_error_matrices(sc.order, sc.gains, gm.H);
  const Eigen::VectorXd e0 = log.errors_at(0).self_state;
  const Eigen::VectorXd eT = log.errors_at(last).self_state;
  const Eigen::VectorXd predicted = testing::expm(ems.self_observer * 1.0) * e0;
  CHECK(e0.cwiseAbs().maxCoeff() > 0.19);
  CHECK((eT - predicted).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("error metrics on a synthetic log") {
  TraceLog log;
  log.time = {0.0, 1.0, 2.0, 3.0, 4.0};
  log.error_sup.resize(5, 4);
  for (int j = 0; j < 4; ++j) log.error_sup.col(j) << 0.5, 0.09, 0.009, 0.0009, 0.0001;
  log.error_sup.col(3) << 0.5, 0.2, 0.09, 0.05, 0.02;  // never below 1e-2

  const ErrorMetrics m = error_metrics(log);
  CHECK(m.final_sup[0] == 0.0001);
  CHECK(m.peak_sup[0] == 0.5);
  CHECK(m.first_crossing[0][0] == 1.0);
  CHECK(m.first_crossing[0][1] == 2.0);
  CHECK(m.first_crossing[0][2] == 3.0);
  CHECK(m.first_crossing[3][0] == 2.0);
  CHECK_FALSE(m.first_crossing[3][1].has_value());
  CHECK_FALSE(m.first_crossing[3][2].has_value());

  CHECK_THROWS_AS(error_metrics(TraceLog{}), EmptyLog);
}

TEST_CASE("adaptive gains are monotone along real runs") {
  Scenario sc = single_follower_scenario(DynamicsMode::nonlinear);
  sc.integration.horizon = 1.0;
  const TraceLog log = integrate(sc);
  CHECK(log.min_gain_step() >= -1e-15);

  TraceLog synthetic;
  synthetic.layout.n = 1;
  synthetic.layout.order = 3;
  synthetic.time = {0.0, 1.0};
  synthetic.states = Eigen::MatrixXd::Zero(2, synthetic.layout.dim());
  synthetic.states(0, synthetic.layout.d()) = 0.5;
  synthetic.states(1, synthetic.layout.d()) = 0.3;
  CHECK(synthetic.min_gain_step() == doctest::Approx(-0.2).epsilon(1e-15));

  TraceLog one_row;
  one_row.time = {0.0};
  CHECK_THROWS_AS(one_row.min_gain_step(), EmptyLog);
}
