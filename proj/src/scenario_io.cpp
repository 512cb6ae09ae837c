#include "hotrack/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hotrack {

namespace {

using nlohmann::json;

constexpr unsigned kLoadAuditSeed = 20240817u;
constexpr int kLoadAuditPairs = 10000;
constexpr int kLoadDerivativeSamples = 4096;

struct Collector {
  std::vector<std::string> issues;

  void add(const std::string& s) { issues.push_back(s); }
  bool ok() const { return issues.empty(); }
  void throw_if_any() {
    if (!issues.empty()) throw ValidationError(std::move(issues));
  }
};

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed, Collector& c) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end())
      c.add(path + ": unknown key '" + key + "'");
  }
}

const json* get_section(const json& root, const char* name, bool required, Collector& c) {
  if (!root.contains(name)) {
    if (required) c.add(std::string(name) + ": section missing");
    return nullptr;
  }
  if (!root[name].is_object()) {
    c.add(std::string(name) + ": must be an object");
    return nullptr;
  }
  return &root[name];
}

bool get_number(const json& obj, const std::string& path, const char* key, double& out,
                Collector& c, bool required = true) {
  if (!obj.contains(key)) {
    if (required) c.add(path + "." + key + ": missing");
    return false;
  }
  if (!obj[key].is_number()) {
    c.add(path + "." + key + ": must be a number");
    return false;
  }
  out = obj[key].get<double>();
  return true;
}

bool get_int(const json& obj, const std::string& path, const char* key, int& out, Collector& c) {
  if (!obj.contains(key)) {
    c.add(path + "." + key + ": missing");
    return false;
  }
  if (!obj[key].is_number_integer()) {
    c.add(path + "." + key + ": must be an integer");
    return false;
  }
  out = obj[key].get<int>();
  return true;
}

bool get_string(const json& obj, const std::string& path, const char* key, std::string& out,
                Collector& c, bool required = true) {
  if (!obj.contains(key)) {
    if (required) c.add(path + "." + key + ": missing");
    return false;
  }
  if (!obj[key].is_string()) {
    c.add(path + "." + key + ": must be a string");
    return false;
  }
  out = obj[key].get<std::string>();
  return true;
}

// scalar broadcast or explicit array of size n
bool get_vector(const json& obj, const std::string& path, const char* key, int n,
                Eigen::VectorXd& out, Collector& c, bool required = true) {
  if (!obj.contains(key)) {
    if (required) c.add(path + "." + key + ": missing");
    return false;
  }
  const json& v = obj[key];
  if (v.is_number()) {
    out = Eigen::VectorXd::Constant(n, v.get<double>());
    return true;
  }
  if (!v.is_array()) {
    c.add(path + "." + key + ": must be a number or an array");
    return false;
  }
  if (static_cast<int>(v.size()) != n) {
    c.add(path + "." + key + ": expected " + std::to_string(n) + " entries, got " +
          std::to_string(v.size()));
    return false;
  }
  out.resize(n);
  for (int i = 0; i < n; ++i) {
    if (!v[i].is_number()) {
      c.add(path + "." + key + "[" + std::to_string(i) + "]: must be a number");
      return false;
    }
    out(i) = v[i].get<double>();
  }
  return true;
}

bool get_matrix(const json& obj, const std::string& path, const char* key, int rows, int cols,
                Eigen::MatrixXd& out, Collector& c) {
  if (!obj.contains(key)) return false;
  const json& v = obj[key];
  if (!v.is_array() || static_cast<int>(v.size()) != rows) {
    c.add(path + "." + key + ": expected " + std::to_string(rows) + " rows");
    return false;
  }
  out.resize(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!v[i].is_array() || static_cast<int>(v[i].size()) != cols) {
      c.add(path + "." + key + "[" + std::to_string(i) + "]: expected " + std::to_string(cols) +
            " numbers");
      return false;
    }
    for (int j = 0; j < cols; ++j) {
      if (!v[i][j].is_number()) {
        c.add(path + "." + key + "[" + std::to_string(i) + "][" + std::to_string(j) +
              "]: must be a number");
        return false;
      }
      out(i, j) = v[i][j].get<double>();
    }
  }
  return true;
}

void load_topology(const json& sec, int n, Scenario& sc, Collector& c) {
  check_keys(sec, "topology", {"edges", "leader_links"}, c);

  std::vector<Edge> edges;
  if (sec.contains("edges")) {
    if (!sec["edges"].is_array()) {
      c.add("topology.edges: must be an array");
      return;
    }
    for (size_t idx = 0; idx < sec["edges"].size(); ++idx) {
      const json& e = sec["edges"][idx];
      if (!e.is_array() || e.size() < 2 || e.size() > 3 || !e[0].is_number_integer() ||
          !e[1].is_number_integer() || (e.size() == 3 && !e[2].is_number())) {
        c.add("topology.edges[" + std::to_string(idx) + "]: expected [i, j] or [i, j, weight]");
        return;
      }
      edges.push_back(
          {e[0].get<int>(), e[1].get<int>(), e.size() == 3 ? e[2].get<double>() : 1.0});
    }
  }

  std::vector<std::pair<int, double>> links;
  if (!sec.contains("leader_links") || !sec["leader_links"].is_array()) {
    c.add("topology.leader_links: must be an array");
    return;
  }
  for (size_t idx = 0; idx < sec["leader_links"].size(); ++idx) {
    const json& e = sec["leader_links"][idx];
    if (e.is_number_integer()) {
      links.emplace_back(e.get<int>(), 1.0);
    } else if (e.is_array() && e.size() == 2 && e[0].is_number_integer() && e[1].is_number()) {
      links.emplace_back(e[0].get<int>(), e[1].get<double>());
    } else {
      c.add("topology.leader_links[" + std::to_string(idx) + "]: expected id or [id, weight]");
      return;
    }
  }

  try {
    sc.topology = build_topology(n, edges, links);
  } catch (const Error& e) {
    c.add(std::string("topology: ") + e.what());
  }
}

void load_leader_input(const json* sec, Scenario& sc, Collector& c) {
  if (!sec) {
    sc.leader_input = LeaderInput::zero();
    return;
  }
  std::string kind;
  if (!get_string(*sec, "leader_input", "kind", kind, c)) return;

  if (kind == "zero") {
    check_keys(*sec, "leader_input", {"kind", "derivative_bound"}, c);
    sc.leader_input = LeaderInput::zero();
  } else if (kind == "sinusoid") {
    check_keys(*sec, "leader_input",
               {"kind", "amplitude", "angular_frequency", "phase", "derivative_bound"}, c);
    double a = 1.0, w = 1.0, ph = 0.0;
    get_number(*sec, "leader_input", "amplitude", a, c);
    get_number(*sec, "leader_input", "angular_frequency", w, c);
    get_number(*sec, "leader_input", "phase", ph, c, false);
    sc.leader_input = LeaderInput::sinusoid(a, w, ph);
  } else if (kind == "polynomial") {
    check_keys(*sec, "leader_input", {"kind", "coefficients", "derivative_bound"}, c);
    if (!(*sec).contains("coefficients") || !(*sec)["coefficients"].is_array()) {
      c.add("leader_input.coefficients: must be an array");
      return;
    }
    std::vector<double> coeffs;
    for (const auto& v : (*sec)["coefficients"]) {
      if (!v.is_number()) {
        c.add("leader_input.coefficients: entries must be numbers");
        return;
      }
      coeffs.push_back(v.get<double>());
    }
    sc.leader_input = LeaderInput::polynomial(std::move(coeffs));
  } else if (kind == "table") {
    check_keys(*sec, "leader_input", {"kind", "t", "u", "derivative_bound"}, c);
    Eigen::VectorXd tv, uv;
    if (!(*sec).contains("t") || !(*sec)["t"].is_array()) {
      c.add("leader_input.t: must be an array");
      return;
    }
    const int nt = static_cast<int>((*sec)["t"].size());
    if (!get_vector(*sec, "leader_input", "t", nt, tv, c) ||
        !get_vector(*sec, "leader_input", "u", nt, uv, c))
      return;
    try {
      sc.leader_input = LeaderInput::table(
          std::vector<double>(tv.data(), tv.data() + tv.size()),
          std::vector<double>(uv.data(), uv.data() + uv.size()));
    } catch (const Error& e) {
      c.add(std::string("leader_input: ") + e.what());
      return;
    }
  } else {
    c.add("leader_input.kind: unknown kind '" + kind + "'");
    return;
  }

  double w = 0.0;
  if (get_number(*sec, "leader_input", "derivative_bound", w, c, false))
    sc.leader_input.derivative_bound_w = w;
}

void load_nonlinearity(const json* sec, Scenario& sc, Collector& c) {
  if (!sec) {
    sc.nonlinearity = Nonlinearity::none();
    return;
  }
  check_keys(*sec, "nonlinearity", {"kind"}, c);
  std::string kind;
  if (!get_string(*sec, "nonlinearity", "kind", kind, c)) return;
  if (kind == "none") {
    sc.nonlinearity = Nonlinearity::none();
  } else if (kind == "cosine_sum") {
    sc.nonlinearity = Nonlinearity::cosine_sum();
  } else if (kind == "custom") {
    c.add("nonlinearity.kind: custom nonlinearities are programmatic only and cannot be "
          "loaded from a file");
  } else {
    c.add("nonlinearity.kind: unknown kind '" + kind + "'");
  }
}

}  // namespace

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const size_t byte = std::min(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
    throw ParseError(line, e.what());
  }

  Collector c;
  if (!root.is_object()) {
    c.add("top level: must be an object");
    c.throw_if_any();
  }
  check_keys(root, "top level",
             {"system", "topology", "gains", "leader_input", "nonlinearity",
              "initial_conditions", "integration"},
             c);

  Scenario sc;

  int n = 0;
  if (const json* sys = get_section(root, "system", true, c)) {
    check_keys(*sys, "system", {"mode", "order", "followers"}, c);
    std::string mode;
    if (get_string(*sys, "system", "mode", mode, c)) {
      if (mode == "linear")
        sc.mode = DynamicsMode::linear;
      else if (mode == "nonlinear")
        sc.mode = DynamicsMode::nonlinear;
      else
        c.add("system.mode: must be 'linear' or 'nonlinear'");
    }
    get_int(*sys, "system", "order", sc.order, c);
    get_int(*sys, "system", "followers", n, c);
    if (n < 1) c.add("system.followers: must be a positive integer");
    if (sc.order < 3) c.add("system.order: must be at least 3");
  }
  // structural failures below depend on these two; stop early if broken
  if (n < 1 || sc.order < 3) c.throw_if_any();

  if (const json* topo = get_section(root, "topology", true, c))
    load_topology(*topo, n, sc, c);

  if (const json* g = get_section(root, "gains", true, c)) {
    check_keys(*g, "gains", {"k", "c0", "r", "tau", "d0"}, c);
    get_vector(*g, "gains", "k", sc.order, sc.gains.k, c);
    get_vector(*g, "gains", "c0", sc.order, sc.gains.c0, c);
    get_vector(*g, "gains", "r", sc.order - 1, sc.gains.r, c);
    if (!get_vector(*g, "gains", "tau", n, sc.gains.tau, c, false))
      sc.gains.tau = Eigen::VectorXd::Ones(n);
    if (!get_vector(*g, "gains", "d0", n, sc.gains.d0, c, false))
      sc.gains.d0 = Eigen::VectorXd::Constant(n, 0.1);
  }

  load_leader_input(get_section(root, "leader_input", false, c), sc, c);
  load_nonlinearity(get_section(root, "nonlinearity", false, c), sc, c);

  if (const json* ic = get_section(root, "initial_conditions", false, c)) {
    check_keys(*ic, "initial_conditions", {"leader", "followers", "u_hat", "z0", "z", "x0_hat1"},
               c);
    Eigen::VectorXd leader;
    Eigen::MatrixXd followers;
    const bool have_leader =
        ic->contains("leader") && get_vector(*ic, "initial_conditions", "leader", sc.order, leader, c);
    const bool have_followers = get_matrix(*ic, "initial_conditions", "followers", n, sc.order,
                                           followers, c);
    if (have_leader || have_followers) {
      sc.initial_agent_states = Scenario::default_initial_states(n, sc.order);
      if (have_leader) sc.initial_agent_states.row(0) = leader.transpose();
      if (have_followers) sc.initial_agent_states.bottomRows(n) = followers;
    }
    get_matrix(*ic, "initial_conditions", "z0", n, sc.order - 1, sc.initial_z0, c);
    get_matrix(*ic, "initial_conditions", "z", n, sc.order - 1, sc.initial_z, c);
    get_vector(*ic, "initial_conditions", "u_hat", n, sc.initial_u_hat, c, false);
    get_vector(*ic, "initial_conditions", "x0_hat1", n, sc.initial_x0_hat1, c, false);
  }

  if (const json* integ = get_section(root, "integration", false, c)) {
    check_keys(*integ, "integration", {"dt", "horizon", "sgn_mode", "epsilon"}, c);
    get_number(*integ, "integration", "dt", sc.integration.dt, c, false);
    get_number(*integ, "integration", "horizon", sc.integration.horizon, c, false);
    std::string mode;
    if (get_string(*integ, "integration", "sgn_mode", mode, c, false)) {
      if (mode == "hard")
        sc.integration.sgn.kind = SignumMode::Kind::hard;
      else if (mode == "boundary_layer")
        sc.integration.sgn.kind = SignumMode::Kind::boundary_layer;
      else
        c.add("integration.sgn_mode: must be 'hard' or 'boundary_layer'");
    }
    get_number(*integ, "integration", "epsilon", sc.integration.sgn.epsilon, c, false);
  }

  c.throw_if_any();

  sc.apply_initial_defaults();
  sc.collect_issues(c.issues);
  c.throw_if_any();

  // declared-bound audits; sampling stays outside the integration path
  if (sc.leader_input.derivative_bound_w) {
    const double w = *sc.leader_input.derivative_bound_w;
    const double observed = max_input_derivative_fd(sc.leader_input, 0.0, sc.integration.horizon,
                                                    kLoadDerivativeSamples);
    if (observed > w * (1.0 + 1e-6) + 1e-9)
      c.add("leader_input.derivative_bound: declared " + std::to_string(w) +
            " but sampled derivative reaches " + std::to_string(observed));
  }
  const LipschitzAudit audit =
      audit_lipschitz(sc.nonlinearity, sc.order, kLoadAuditPairs, kLoadAuditSeed, 10.0, 1e-9);
  if (!audit.ok)
    c.add("nonlinearity: sampled growth violates the declared Lipschitz constant at order " +
          std::to_string(audit.worst_m));
  c.throw_if_any();

  return sc;
}

std::string scenario_to_json(const Scenario& sc) {
  json root;
  const int n = sc.n_followers();

  root["system"] = {{"mode", sc.mode == DynamicsMode::linear ? "linear" : "nonlinear"},
                    {"order", sc.order},
                    {"followers", n}};

  json edges = json::array();
  for (const Edge& e : sc.topology.edges()) edges.push_back({e.i, e.j, e.weight});
  json links = json::array();
  for (int i = 0; i < n; ++i)
    if (sc.topology.leader_links()(i) > 0.0)
      links.push_back({i + 1, sc.topology.leader_links()(i)});
  root["topology"] = {{"edges", edges}, {"leader_links", links}};

  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  root["gains"] = {{"k", vec(sc.gains.k)},
                   {"c0", vec(sc.gains.c0)},
                   {"r", vec(sc.gains.r)},
                   {"tau", vec(sc.gains.tau)},
                   {"d0", vec(sc.gains.d0)}};

  json li;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LeaderInput::Zero>) {
          li["kind"] = "zero";
        } else if constexpr (std::is_same_v<T, LeaderInput::Sinusoid>) {
          li["kind"] = "sinusoid";
          li["amplitude"] = s.amplitude;
          li["angular_frequency"] = s.omega;
          li["phase"] = s.phase;
        } else if constexpr (std::is_same_v<T, LeaderInput::Polynomial>) {
          li["kind"] = "polynomial";
          li["coefficients"] = s.coeffs;
        } else {
          li["kind"] = "table";
          li["t"] = s.spline.knots_t();
          li["u"] = s.spline.knots_y();
        }
      },
      sc.leader_input.shape);
  if (sc.leader_input.derivative_bound_w)
    li["derivative_bound"] = *sc.leader_input.derivative_bound_w;
  root["leader_input"] = li;

  switch (sc.nonlinearity.kind()) {
    case Nonlinearity::Kind::none:
      root["nonlinearity"] = {{"kind", "none"}};
      break;
    case Nonlinearity::Kind::cosine_sum:
      root["nonlinearity"] = {{"kind", "cosine_sum"}};
      break;
    case Nonlinearity::Kind::custom:
      throw Error("custom nonlinearities cannot be serialized");
  }

  auto mat = [](const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
    return rows;
  };
  root["initial_conditions"] = {
      {"leader", vec(sc.initial_agent_states.row(0).transpose())},
      {"followers", mat(sc.initial_agent_states.bottomRows(n))},
      {"u_hat", vec(sc.initial_u_hat)},
      {"z0", mat(sc.initial_z0)},
      {"z", mat(sc.initial_z)},
      {"x0_hat1", vec(sc.initial_x0_hat1)}};

  root["integration"] = {{"dt", sc.integration.dt}, {"horizon", sc.integration.horizon}};
  if (sc.integration.sgn.kind == SignumMode::Kind::boundary_layer) {
    root["integration"]["sgn_mode"] = "boundary_layer";
    root["integration"]["epsilon"] = sc.integration.sgn.epsilon;
  } else {
    root["integration"]["sgn_mode"] = "hard";
  }

  return root.dump(2) + "\n";
}

void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write scenario file: " + path);
  out << scenario_to_json(sc);
}

}  // namespace hotrack
