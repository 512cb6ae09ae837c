#include "hotrack/sim.hpp"

#include <cmath>
#include <string>

#include "hotrack/controllers.hpp"
#include "hotrack/integrator.hpp"
#include "hotrack/observers.hpp"

namespace hotrack {

namespace {

using RowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

Eigen::MatrixXd mat_block(const Eigen::VectorXd& y, int offset, int rows, int cols) {
  return RowMajorMap(y.data() + offset, rows, cols);
}

}  // namespace

StateLayout StateLayout::for_scenario(const Scenario& sc) {
  StateLayout lay;
  lay.n = sc.n_followers();
  lay.order = sc.order;
  lay.has_x0_hat1 = sc.mode == DynamicsMode::nonlinear;
  return lay;
}

Eigen::VectorXd initial_state(const Scenario& sc, const StateLayout& lay) {
  const int n = lay.n, l = lay.order;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(lay.dim());
  for (int i = 0; i <= n; ++i)
    y.segment(lay.agent(i), l) = sc.initial_agent_states.row(i).transpose();
  y.segment(lay.u_hat(), n) = sc.initial_u_hat;
  y.segment(lay.d(), n) = sc.gains.d0;
  for (int i = 0; i < n; ++i)
    y.segment(lay.z0() + i * (l - 1), l - 1) = sc.initial_z0.row(i).transpose();
  if (lay.has_x0_hat1) y.segment(lay.x0_hat1(), n) = sc.initial_x0_hat1;
  for (int i = 0; i < n; ++i)
    y.segment(lay.z() + i * (l - 1), l - 1) = sc.initial_z.row(i).transpose();
  return y;
}

ClosedLoopEval closed_loop_derivative(const Scenario& sc, const StateLayout& lay, double t,
                                      const Eigen::VectorXd& y) {
  if (y.size() != lay.dim()) throw DimensionMismatch("state size != layout dimension");
  if (!y.allFinite()) throw NonFiniteState("closed-loop state not finite at t=" + std::to_string(t));

  const int n = lay.n, l = lay.order;
  const bool nonlinear = sc.mode == DynamicsMode::nonlinear;

  const Eigen::VectorXd x0 = y.segment(lay.agent(0), l);
  const Eigen::MatrixXd X = mat_block(y, lay.agent(1), n, l);  // follower states
  const Eigen::VectorXd u_hat = y.segment(lay.u_hat(), n);
  const Eigen::VectorXd d = y.segment(lay.d(), n);
  const Eigen::MatrixXd z0 = mat_block(y, lay.z0(), n, l - 1);
  const Eigen::MatrixXd z = mat_block(y, lay.z(), n, l - 1);

  const double u0 = sc.leader_input.value(t);
  const Eigen::VectorXd x1 = X.col(0);

  const Eigen::MatrixXd x0_hat = leader_state_estimates(z0, sc.topology, x0(0), sc.gains.c0);
  const Eigen::MatrixXd x_hat = self_state_estimates(z, x1, sc.gains.r);

  ClosedLoopEval out;
  out.u0 = u0;

  Eigen::VectorXd x0_hat1;
  if (nonlinear) {
    x0_hat1 = y.segment(lay.x0_hat1(), n);
    out.controls = nonlinear_control(x1, x0_hat1, x_hat, x0_hat, u_hat, sc.gains.k);
  } else {
    Eigen::VectorXd x1_all(n + 1);
    x1_all(0) = x0(0);
    x1_all.tail(n) = x1;
    out.controls = linear_control(sc.topology, x1_all, x_hat, x0_hat, u_hat, sc.gains.k);
  }

  out.dy.resize(lay.dim());

  if (nonlinear) {
    out.dy.segment(lay.agent(0), l) = nonlinear_drift(x0, u0, sc.nonlinearity);
    for (int i = 0; i < n; ++i)
      out.dy.segment(lay.agent(i + 1), l) =
          nonlinear_drift(X.row(i).transpose(), out.controls(i), sc.nonlinearity);
  } else {
    out.dy.segment(lay.agent(0), l) = linear_drift(x0, u0);
    for (int i = 0; i < n; ++i)
      out.dy.segment(lay.agent(i + 1), l) = linear_drift(X.row(i).transpose(), out.controls(i));
  }

  const InputObserverDerivative io = input_observer_derivative(
      {u_hat, d}, sc.topology, u0, sc.gains.tau, sc.integration.sgn);
  out.dy.segment(lay.u_hat(), n) = io.du_hat;
  out.dy.segment(lay.d(), n) = io.dd;

  if (nonlinear) {
    const LeaderStateObserverDerivative lo = leader_state_observer_derivative_nonlinear(
        {x0_hat1, z0}, sc.topology, x0(0), u_hat, sc.gains.c0, sc.nonlinearity);
    for (int i = 0; i < n; ++i)
      out.dy.segment(lay.z0() + i * (l - 1), l - 1) = lo.dz0.row(i).transpose();
    out.dy.segment(lay.x0_hat1(), n) = lo.dx0_hat1;
  } else {
    const Eigen::MatrixXd dz0 = leader_state_observer_derivative_linear(
        {Eigen::VectorXd(), z0}, sc.topology, x0(0), u_hat, sc.gains.c0);
    for (int i = 0; i < n; ++i)
      out.dy.segment(lay.z0() + i * (l - 1), l - 1) = dz0.row(i).transpose();
  }

  const Eigen::MatrixXd dz =
      nonlinear ? self_state_observer_derivative_nonlinear({z}, x1, out.controls, sc.gains.r,
                                                           sc.nonlinearity)
                : self_state_observer_derivative_linear({z}, x1, out.controls, sc.gains.r);
  for (int i = 0; i < n; ++i)
    out.dy.segment(lay.z() + i * (l - 1), l - 1) = dz.row(i).transpose();

  return out;
}

std::array<double, 4> ErrorSnapshot::sup() const {
  auto amax = [](const Eigen::VectorXd& v) {
    return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  };
  return {amax(input), amax(leader_state), amax(self_state), amax(tracking)};
}

ErrorSnapshot error_snapshot(const Scenario& sc, const StateLayout& lay, double t,
                             const Eigen::VectorXd& y) {
  const int n = lay.n, l = lay.order;
  const Eigen::VectorXd x0 = y.segment(lay.agent(0), l);
  const Eigen::MatrixXd X = mat_block(y, lay.agent(1), n, l);
  const Eigen::MatrixXd z0 = mat_block(y, lay.z0(), n, l - 1);
  const Eigen::MatrixXd z = mat_block(y, lay.z(), n, l - 1);

  const Eigen::MatrixXd x0_hat = leader_state_estimates(z0, sc.topology, x0(0), sc.gains.c0);
  const Eigen::MatrixXd x_hat = self_state_estimates(z, X.col(0), sc.gains.r);

  ErrorSnapshot e;
  e.input = (y.segment(lay.u_hat(), n).array() - sc.leader_input.value(t)).matrix();

  const int lead_blocks = lay.has_x0_hat1 ? l : l - 1;
  e.leader_state.resize(n * lead_blocks);
  int at = 0;
  if (lay.has_x0_hat1) {
    e.leader_state.segment(0, n) = (y.segment(lay.x0_hat1(), n).array() - x0(0)).matrix();
    at = n;
  }
  for (int m = 2; m <= l; ++m, at += n)
    e.leader_state.segment(at, n) = (x0_hat.col(m - 2).array() - x0(m - 1)).matrix();

  e.self_state.resize(n * (l - 1));
  for (int m = 2; m <= l; ++m)
    e.self_state.segment((m - 2) * n, n) = x_hat.col(m - 2) - X.col(m - 1);

  e.tracking.resize(n * l);
  for (int m = 1; m <= l; ++m)
    e.tracking.segment((m - 1) * n, n) = (X.col(m - 1).array() - x0(m - 1)).matrix();
  return e;
}

ErrorSnapshot TraceLog::errors_at(int row) const {
  if (row < 0 || row >= rows()) throw EmptyLog("trace row out of range");
  const Eigen::VectorXd y = states.row(row).transpose();
  return error_snapshot(scenario, layout, time[row], y);
}

double TraceLog::min_gain_step() const {
  if (rows() < 2) throw EmptyLog("gain monotonicity needs at least two records");
  const int n = layout.n;
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 1; k < rows(); ++k)
    worst = std::min(worst, (states.row(k).segment(layout.d(), n) -
                             states.row(k - 1).segment(layout.d(), n))
                                .minCoeff());
  return worst;
}

TraceLog integrate(const Scenario& sc) {
  sc.validate();
  const StateLayout lay = StateLayout::for_scenario(sc);
  const double dt = sc.integration.dt;
  const long long steps = std::max<long long>(1, std::llround(sc.integration.horizon / dt));

  TraceLog log;
  log.scenario = sc;
  log.layout = lay;
  log.time.resize(steps + 1);
  log.states.resize(steps + 1, lay.dim());
  log.controls.resize(steps + 1, lay.n);
  log.error_sup.resize(steps + 1, 4);

  auto rhs = [&](double t, const Eigen::VectorXd& state) {
    return closed_loop_derivative(sc, lay, t, state).dy;
  };

  Eigen::VectorXd y = initial_state(sc, lay);
  auto record = [&](long long row, double t, const Eigen::VectorXd& controls) {
    log.time[row] = t;
    log.states.row(row) = y.transpose();
    log.controls.row(row) = controls.transpose();
    const auto sup = error_snapshot(sc, lay, t, y).sup();
    for (int j = 0; j < 4; ++j) log.error_sup(row, j) = sup[j];
  };

  for (long long k = 0; k < steps; ++k) {
    const double t = k * dt;
    const ClosedLoopEval eval = closed_loop_derivative(sc, lay, t, y);
    record(k, t, eval.controls);

    const double prev_sup = y.cwiseAbs().maxCoeff();
    Eigen::VectorXd y_next = rk4_step(rhs, t, y, dt, eval.dy);
    const double t_next = (k + 1) * dt;

    if (!y_next.allFinite())
      throw Diverged(t_next, "state not finite at t=" + std::to_string(t_next));
    const double sup = y_next.cwiseAbs().maxCoeff();
    if (sup > 1e6)
      throw Diverged(t_next, "state sup-norm " + std::to_string(sup) + " exceeds 1e6 at t=" +
                                 std::to_string(t_next));
    if (sup > 1e6 * std::max(1.0, prev_sup))
      throw StepTooLarge(t_next, "state grew more than 1e6-fold in one step at t=" +
                                     std::to_string(t_next));
    y = std::move(y_next);
  }
  record(steps, steps * dt, closed_loop_derivative(sc, lay, steps * dt, y).controls);
  return log;
}

ErrorMetrics error_metrics(const TraceLog& log) {
  if (log.rows() == 0) throw EmptyLog("error metrics need a nonempty trace");

  ErrorMetrics m;
  const int last = log.rows() - 1;
  for (int j = 0; j < 4; ++j) {
    m.final_sup[j] = log.error_sup(last, j);
    m.peak_sup[j] = log.error_sup.col(j).maxCoeff();
    for (size_t th = 0; th < kErrorThresholds.size(); ++th)
      for (int k = 0; k <= last; ++k)
        if (log.error_sup(k, j) < kErrorThresholds[th]) {
          m.first_crossing[j][th] = log.time[k];
          break;
        }
  }
  return m;
}

}  // namespace hotrack
