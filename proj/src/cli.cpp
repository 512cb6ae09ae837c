#include "hotrack/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <ostream>

#include "hotrack/scenario_io.hpp"
#include "hotrack/sim.hpp"
#include "hotrack/stability.hpp"
#include "hotrack/sweep.hpp"
#include "hotrack/trace_io.hpp"

namespace hotrack {

namespace {

// nullopt on failure after reporting; exit-code handling stays in one place
std::optional<Scenario> load_with_overrides(const std::string& path,
                                            const RunOverrides& overrides, std::ostream& err) {
  Scenario sc;
  try {
    sc = load_scenario(path);
  } catch (const ParseError& e) {
    err << e.what() << "\n";
    return std::nullopt;
  } catch (const ValidationError& e) {
    for (const std::string& issue : e.issues) err << issue << "\n";
    return std::nullopt;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return std::nullopt;
  }

  if (overrides.dt) sc.integration.dt = *overrides.dt;
  if (overrides.horizon) sc.integration.horizon = *overrides.horizon;
  if (overrides.sgn_mode) {
    if (*overrides.sgn_mode == "hard")
      sc.integration.sgn.kind = SignumMode::Kind::hard;
    else if (*overrides.sgn_mode == "boundary_layer")
      sc.integration.sgn.kind = SignumMode::Kind::boundary_layer;
    else {
      err << "sgn-mode must be 'hard' or 'boundary_layer'\n";
      return std::nullopt;
    }
  }
  if (overrides.epsilon) sc.integration.sgn.epsilon = *overrides.epsilon;

  std::vector<std::string> issues;
  sc.collect_issues(issues);
  if (!issues.empty()) {
    for (const std::string& issue : issues) err << issue << "\n";
    return std::nullopt;
  }
  return sc;
}

bool ensure_dir(const std::string& dir, std::ostream& err) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    err << "cannot create output directory " << dir << ": " << ec.message() << "\n";
    return false;
  }
  return true;
}

}  // namespace

std::string resolve_out_dir(const std::optional<std::string>& out_flag) {
  if (out_flag) return *out_flag;
  if (const char* env = std::getenv(kOutDirEnvVar); env && *env) return env;
  return ".";
}

int run_simulate(const std::string& scenario_path, const std::string& out_dir,
                 const RunOverrides& overrides, std::ostream& out, std::ostream& err) {
  const auto sc = load_with_overrides(scenario_path, overrides, err);
  if (!sc) return kExitValidation;
  if (!ensure_dir(out_dir, err)) return kExitFailure;

  TraceLog log;
  try {
    log = integrate(*sc);
  } catch (const Diverged& e) {
    err << e.what() << "\n";
    return kExitDivergence;
  } catch (const StepTooLarge& e) {
    err << e.what() << "\n";
    return kExitDivergence;
  }

  const std::filesystem::path dir(out_dir);
  try {
    write_trace_csv(log, (dir / "trace.csv").string());
    write_errors_csv(log, (dir / "errors.csv").string());
    write_summary(log, (dir / "summary.txt").string());
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitFailure;
  }

  const ErrorMetrics metrics = error_metrics(log);
  out << "simulated " << log.scenario.integration.horizon << " s in " << (log.rows() - 1)
      << " steps\n";
  out << "final sup errors: input " << metrics.final_sup[0] << ", leader state "
      << metrics.final_sup[1] << ", self state " << metrics.final_sup[2] << ", tracking "
      << metrics.final_sup[3] << "\n";
  out << "wrote " << (dir / "trace.csv").string() << ", " << (dir / "errors.csv").string()
      << ", " << (dir / "summary.txt").string() << "\n";
  return kExitOk;
}

int run_certify(const std::string& scenario_path, bool eta_search, bool kv,
                const RunOverrides& overrides, std::ostream& out, std::ostream& err) {
  const auto sc = load_with_overrides(scenario_path, overrides, err);
  if (!sc) return kExitValidation;

  CertifyOptions opts;
  opts.eta_search = eta_search;
  const StabilityReport report = sc->mode == DynamicsMode::linear
                                     ? check_theorem1(*sc)
                                     : check_theorem2(*sc, opts);
  out << report.to_text();
  if (kv) out << report.to_kv();
  return report.all_passed() ? kExitOk : kExitCertification;
}

int run_sweep(const std::string& scenario_path, const std::vector<std::string>& grid_specs,
              bool simulate_points, const std::string& out_dir, const RunOverrides& overrides,
              std::ostream& out, std::ostream& err) {
  const auto sc = load_with_overrides(scenario_path, overrides, err);
  if (!sc) return kExitValidation;
  if (!ensure_dir(out_dir, err)) return kExitFailure;

  std::vector<GridAxis> axes;
  try {
    for (const std::string& spec : grid_specs) axes.push_back(GridAxis::parse(spec));
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitValidation;
  }

  SweepOptions opts;
  opts.simulate = simulate_points;
  if (overrides.horizon) opts.sim_horizon = *overrides.horizon;

  SweepResult result;
  try {
    result = run_sweep_grid(*sc, axes, opts);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitValidation;
  }

  const std::filesystem::path csv = std::filesystem::path(out_dir) / "sweep.csv";
  try {
    write_sweep_csv(result, csv.string());
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitFailure;
  }

  size_t passed = 0;
  for (const SweepPoint& p : result.points)
    if (p.certified) ++passed;
  out << result.points.size() << " grid points, " << passed << " certified\n";
  out << "wrote " << csv.string() << "\n";
  return kExitOk;
}

}  // namespace hotrack
