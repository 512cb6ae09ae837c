#include "hotrack/sweep.hpp"

#include <cctype>
#include <cstring>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>

#include "hotrack/errors.hpp"
#include "hotrack/sim.hpp"
#include "hotrack/stability.hpp"

namespace hotrack {

namespace {

// "c02" -> index 2 into c0; rejects anything but pure digits after the stem
bool strip_stem(const std::string& name, const char* stem, int& index) {
  const size_t len = std::strlen(stem);
  if (name.size() <= len || name.compare(0, len, stem) != 0) return false;
  for (size_t p = len; p < name.size(); ++p)
    if (!std::isdigit(static_cast<unsigned char>(name[p]))) return false;
  index = std::atoi(name.c_str() + len);
  return true;
}

void apply_axis(Scenario& sc, const std::string& name, double value) {
  if (name == "tau") {
    sc.gains.tau.setConstant(value);
    return;
  }
  if (name == "d0") {
    sc.gains.d0.setConstant(value);
    return;
  }
  auto pick = [&](Eigen::VectorXd& v, int index, int lowest) -> double& {
    if (index < lowest || index - lowest >= v.size())
      throw Error("sweep: axis '" + name + "' is out of range for order " +
                  std::to_string(sc.order));
    return v(index - lowest);
  };
  int index = 0;
  if (strip_stem(name, "c0", index))
    pick(sc.gains.c0, index, 1) = value;
  else if (strip_stem(name, "k", index))
    pick(sc.gains.k, index, 1) = value;
  else if (strip_stem(name, "r", index))
    pick(sc.gains.r, index, 2) = value;
  else
    throw Error("sweep: unknown axis '" + name + "'");
}

}  // namespace

double GridAxis::value(int step) const {
  if (count <= 1) return lo;
  return lo + (hi - lo) * static_cast<double>(step) / static_cast<double>(count - 1);
}

GridAxis GridAxis::parse(const std::string& spec) {
  const auto bad = [&]() -> GridAxis {
    throw Error("sweep: grid spec '" + spec + "' is not of the form name=lo:hi:count");
  };
  const size_t eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) return bad();
  const size_t c1 = spec.find(':', eq + 1);
  const size_t c2 = c1 == std::string::npos ? std::string::npos : spec.find(':', c1 + 1);
  if (c2 == std::string::npos) return bad();

  GridAxis axis;
  axis.name = spec.substr(0, eq);
  try {
    size_t used = 0;
    const std::string lo_s = spec.substr(eq + 1, c1 - eq - 1);
    const std::string hi_s = spec.substr(c1 + 1, c2 - c1 - 1);
    const std::string n_s = spec.substr(c2 + 1);
    axis.lo = std::stod(lo_s, &used);
    if (used != lo_s.size()) return bad();
    axis.hi = std::stod(hi_s, &used);
    if (used != hi_s.size()) return bad();
    axis.count = std::stoi(n_s, &used);
    if (used != n_s.size()) return bad();
  } catch (const std::exception&) {
    return bad();
  }
  if (axis.count < 1) throw Error("sweep: grid spec '" + spec + "' needs count >= 1");
  if (!std::isfinite(axis.lo) || !std::isfinite(axis.hi))
    throw Error("sweep: grid spec '" + spec + "' needs finite bounds");
  return axis;
}

SweepResult run_sweep_grid(const Scenario& base, const std::vector<GridAxis>& axes,
                           const SweepOptions& opts) {
  if (axes.empty()) throw Error("sweep: no grid axes given");

  long long total = 1;
  for (const GridAxis& a : axes) total *= a.count;
  if (total > 1000000) throw Error("sweep: grid has too many points");

  // fail fast on unknown axis names before spending time on the grid
  {
    Scenario probe = base;
    for (const GridAxis& a : axes) apply_axis(probe, a.name, a.value(0));
  }

  SweepResult result;
  result.axes = axes;
  result.simulated = opts.simulate;
  result.points.resize(static_cast<size_t>(total));

  const int n_axes = static_cast<int>(axes.size());
#pragma omp parallel for schedule(dynamic)
  for (long long flat = 0; flat < total; ++flat) {
    SweepPoint& point = result.points[static_cast<size_t>(flat)];
    point.values.resize(n_axes);

    Scenario sc = base;
    long long rem = flat;
    for (int a = n_axes - 1; a >= 0; --a) {
      const int step = static_cast<int>(rem % axes[a].count);
      rem /= axes[a].count;
      point.values[a] = axes[a].value(step);
      apply_axis(sc, axes[a].name, point.values[a]);
    }

    std::vector<std::string> issues;
    sc.collect_issues(issues);
    if (!issues.empty()) {
      point.certified = false;
      point.failed_clauses = "invalid_gains";
      point.diverged = false;
      continue;
    }

    const StabilityReport report = sc.mode == DynamicsMode::linear
                                       ? check_theorem1(sc)
                                       : check_theorem2(sc);
    point.certified = report.all_passed();
    if (!point.certified) {
      std::string joined;
      for (const std::string& nm : report.failed_names()) {
        if (!joined.empty()) joined += ';';
        joined += nm;
      }
      point.failed_clauses = joined;
    }

    if (opts.simulate) {
      sc.integration.horizon = opts.sim_horizon;
      try {
        const TraceLog log = integrate(sc);
        point.final_sup = error_metrics(log).final_sup;
      } catch (const Diverged&) {
        point.diverged = true;
      } catch (const StepTooLarge&) {
        point.diverged = true;
      }
    }
  }
  return result;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  const std::string tmp = path + ".tmp";
  std::ofstream out(tmp);
  if (!out) throw Error("cannot write output file: " + tmp);
  out << std::setprecision(10);

  for (const GridAxis& a : result.axes) out << a.name << ",";
  out << "certified,failed_clauses";
  if (result.simulated)
    out << ",diverged,final_e_input,final_e_leader_state,final_e_self_state,final_e_tracking";
  out << "\n";

  for (const SweepPoint& p : result.points) {
    for (double v : p.values) out << v << ",";
    out << (p.certified ? 1 : 0) << "," << p.failed_clauses;
    if (result.simulated) {
      out << "," << (p.diverged ? 1 : 0);
      for (int c = 0; c < 4; ++c) {
        out << ",";
        if (!p.diverged) out << p.final_sup[c];
      }
    }
    out << "\n";
  }
  out.flush();
  if (!out) throw Error("write failed: " + tmp);
  out.close();
  std::filesystem::rename(tmp, path);
}

}  // namespace hotrack
