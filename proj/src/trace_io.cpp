#include "hotrack/trace_io.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>

#include "hotrack/errors.hpp"
#include "hotrack/observers.hpp"

namespace hotrack {

namespace {

using RowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                   Eigen::RowMajor>>;

std::ofstream open_tmp(const std::string& tmp) {
  std::ofstream out(tmp);
  if (!out) throw Error("cannot write output file: " + tmp);
  out << std::setprecision(10);
  return out;
}

void commit(std::ofstream& out, const std::string& tmp, const std::string& path) {
  out.flush();
  if (!out) throw Error("write failed: " + tmp);
  out.close();
  std::filesystem::rename(tmp, path);
}

}  // namespace

void write_trace_csv(const TraceLog& log, const std::string& path) {
  if (log.rows() == 0) throw EmptyLog("cannot write an empty trace");
  const StateLayout& lay = log.layout;
  const int n = lay.n;
  const int l = lay.order;

  const std::string tmp = path + ".tmp";
  std::ofstream out = open_tmp(tmp);

  out << "t";
  for (int m = 1; m <= l; ++m) out << ",x_0_" << m;
  for (int i = 1; i <= n; ++i)
    for (int m = 1; m <= l; ++m) out << ",x_" << i << "_" << m;
  for (int i = 1; i <= n; ++i) out << ",u_" << i;
  for (int i = 1; i <= n; ++i) out << ",uhat_" << i;
  for (int i = 1; i <= n; ++i) out << ",d_" << i;
  if (lay.has_x0_hat1)
    for (int i = 1; i <= n; ++i) out << ",x0hat_" << i << "_1";
  for (int i = 1; i <= n; ++i)
    for (int m = 2; m <= l; ++m) out << ",x0hat_" << i << "_" << m;
  for (int i = 1; i <= n; ++i)
    for (int m = 2; m <= l; ++m) out << ",xhat_" << i << "_" << m;
  for (int i = 1; i <= n; ++i)
    for (int m = 2; m <= l; ++m) out << ",z0_" << i << "_" << m;
  for (int i = 1; i <= n; ++i)
    for (int m = 2; m <= l; ++m) out << ",z_" << i << "_" << m;
  out << "\n";

  Eigen::VectorXd x1(n);
  for (int rrow = 0; rrow < log.rows(); ++rrow) {
    const Eigen::VectorXd y = log.states.row(rrow).transpose();
    const double x01 = y(lay.agent(0));
    for (int i = 0; i < n; ++i) x1(i) = y(lay.agent(i + 1));
    const RowMajorMap z0(y.data() + lay.z0(), n, l - 1);
    const RowMajorMap z(y.data() + lay.z(), n, l - 1);
    const Eigen::MatrixXd x0_hat =
        leader_state_estimates(z0, log.scenario.topology, x01, log.scenario.gains.c0);
    const Eigen::MatrixXd x_hat = self_state_estimates(z, x1, log.scenario.gains.r);

    out << log.time[rrow];
    for (int j = 0; j < (n + 1) * l; ++j) out << "," << y(j);
    for (int i = 0; i < n; ++i) out << "," << log.controls(rrow, i);
    for (int i = 0; i < n; ++i) out << "," << y(lay.u_hat() + i);
    for (int i = 0; i < n; ++i) out << "," << y(lay.d() + i);
    if (lay.has_x0_hat1)
      for (int i = 0; i < n; ++i) out << "," << y(lay.x0_hat1() + i);
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < l - 1; ++m) out << "," << x0_hat(i, m);
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < l - 1; ++m) out << "," << x_hat(i, m);
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < l - 1; ++m) out << "," << z0(i, m);
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < l - 1; ++m) out << "," << z(i, m);
    out << "\n";
  }
  commit(out, tmp, path);
}

void write_errors_csv(const TraceLog& log, const std::string& path) {
  if (log.rows() == 0) throw EmptyLog("cannot write an empty trace");
  const std::string tmp = path + ".tmp";
  std::ofstream out = open_tmp(tmp);
  out << "t,e_input,e_leader_state,e_self_state,e_tracking\n";
  for (int rrow = 0; rrow < log.rows(); ++rrow) {
    out << log.time[rrow];
    for (int c = 0; c < 4; ++c) out << "," << log.error_sup(rrow, c);
    out << "\n";
  }
  commit(out, tmp, path);
}

void write_summary(const TraceLog& log, const std::string& path) {
  const ErrorMetrics metrics = error_metrics(log);
  static constexpr const char* names[4] = {"input", "leader_state", "self_state", "tracking"};

  const std::string tmp = path + ".tmp";
  std::ofstream out = open_tmp(tmp);
  out << "followers: " << log.layout.n << "\n";
  out << "order: " << log.layout.order << "\n";
  out << "mode: " << (log.scenario.mode == DynamicsMode::linear ? "linear" : "nonlinear")
      << "\n";
  out << "dt: " << log.scenario.integration.dt << "\n";
  out << "horizon: " << log.scenario.integration.horizon << "\n";
  out << "records: " << log.rows() << "\n";
  for (int c = 0; c < 4; ++c) {
    out << "error." << names[c] << ".final: " << metrics.final_sup[c] << "\n";
    out << "error." << names[c] << ".peak: " << metrics.peak_sup[c] << "\n";
    for (size_t k = 0; k < kErrorThresholds.size(); ++k) {
      out << "error." << names[c] << ".below_" << kErrorThresholds[k] << ": ";
      if (metrics.first_crossing[c][k])
        out << *metrics.first_crossing[c][k];
      else
        out << "never";
      out << "\n";
    }
  }
  if (log.rows() >= 2) out << "min_gain_step: " << log.min_gain_step() << "\n";
  commit(out, tmp, path);
}

}  // namespace hotrack
