#include "satsync/io.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "satsync/version.hpp"

namespace satsync {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* a : allowed)
      if (it.key() == a) {
        known = true;
        break;
      }
    if (!known) fail(path + ": unknown key \"" + it.key() + "\"");
  }
}

const json& require_key(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) fail(path + ": missing required key \"" + key + "\"");
  return j.at(key);
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path + ": expected an integer");
  return j.get<int>();
}

double get_double(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path + ": expected a number");
  return j.get<double>();
}

Vector parse_vector(const json& j, const std::string& path, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    fail(path + ": expected an array of " + std::to_string(dim) + " numbers");
  Vector v(dim);
  for (int k = 0; k < dim; ++k)
    v[k] = get_double(j.at(static_cast<size_t>(k)),
                      path + "[" + std::to_string(k) + "]");
  return v;
}

std::vector<Vector> parse_state_list(const json& j, const std::string& path,
                                     int rows, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    fail(path + ": expected " + std::to_string(rows) + " rows");
  std::vector<Vector> out;
  out.reserve(static_cast<size_t>(rows));
  for (int r = 0; r < rows; ++r)
    out.push_back(parse_vector(j.at(static_cast<size_t>(r)),
                               path + "[" + std::to_string(r) + "]", dim));
  return out;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

json json_or_null(double v) {
  if (std::isfinite(v)) return json(v);
  return json(nullptr);
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing " + p.string());
}

}  // namespace

SimConfig parse_config(const std::string& text, bool enforce_gain_region) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config",
             {"plant", "graph", "roots", "bounds", "gains", "mode",
              "zeta_bar_form", "sim"});

  SimConfig cfg;

  const json& plant = require_key(j, "config", "plant");
  check_keys(plant, "plant", {"n"});
  cfg.n = get_int(require_key(plant, "plant", "n"), "plant.n");
  if (cfg.n < 1) fail("plant.n: must be at least 1");

  const json& graph = require_key(j, "config", "graph");
  check_keys(graph, "graph", {"nodes", "edges"});
  const int nodes = get_int(require_key(graph, "graph", "nodes"), "graph.nodes");
  if (nodes < 1) fail("graph.nodes: must be at least 1");
  const json& edges = require_key(graph, "graph", "edges");
  if (!edges.is_array()) fail("graph.edges: expected an array");
  Matrix weights = Matrix::Zero(nodes, nodes);
  std::set<std::pair<int, int>> seen_edges;
  for (size_t k = 0; k < edges.size(); ++k) {
    const std::string path = "graph.edges[" + std::to_string(k) + "]";
    const json& e = edges.at(k);
    if (!e.is_array() || e.size() != 3)
      fail(path + ": expected a [from, to, weight] triple");
    const int from = get_int(e.at(0), path + ".from");
    const int to = get_int(e.at(1), path + ".to");
    const double w = get_double(e.at(2), path + ".weight");
    if (from < 1 || from > nodes) fail(path + ".from: node index out of range");
    if (to < 1 || to > nodes) fail(path + ".to: node index out of range");
    if (from == to) fail(path + ": self-loops are not allowed");
    if (!std::isfinite(w) || w < 0.0) fail(path + ".weight: must be finite and nonnegative");
    if (!seen_edges.insert({from, to}).second) fail(path + ": duplicate edge");
    weights(to - 1, from - 1) = w;
  }
  cfg.graph = Graph(nodes, weights);

  const json& roots = require_key(j, "config", "roots");
  if (!roots.is_array() || roots.empty())
    fail("roots: expected a nonempty array of node indices");
  std::set<int> seen_roots;
  cfg.roots.clear();
  for (size_t k = 0; k < roots.size(); ++k) {
    const std::string path = "roots[" + std::to_string(k) + "]";
    const int r = get_int(roots.at(k), path);
    if (r < 1 || r > nodes) fail(path + ": node index out of range");
    if (!seen_roots.insert(r).second) fail(path + ": duplicate root");
    cfg.roots.push_back(r - 1);
  }

  if (j.contains("bounds")) {
    const json& b = j.at("bounds");
    if (!b.is_array() || static_cast<int>(b.size()) != nodes)
      fail("bounds: expected one value per node");
    std::vector<double> vals;
    for (size_t k = 0; k < b.size(); ++k)
      vals.push_back(get_double(b.at(k), "bounds[" + std::to_string(k) + "]"));
    try {
      DegreeBounds check(cfg.graph, vals);
    } catch (const std::invalid_argument& e) {
      fail(std::string("bounds: ") + e.what());
    }
    cfg.bounds = std::move(vals);
  }

  const json& gains = require_key(j, "config", "gains");
  check_keys(gains, "gains", {"k1", "k2", "f1", "f2"});
  cfg.gains.k1 = get_double(require_key(gains, "gains", "k1"), "gains.k1");
  cfg.gains.k2 = get_double(require_key(gains, "gains", "k2"), "gains.k2");
  if (gains.contains("f1")) cfg.gains.f1 = get_double(gains.at("f1"), "gains.f1");
  if (gains.contains("f2")) cfg.gains.f2 = get_double(gains.at("f2"), "gains.f2");
  if (enforce_gain_region && !gain_region_contains(cfg.gains.k1, cfg.gains.k2))
    fail("gains: (k1, k2) outside the admissible gain region");

  const json& mode = require_key(j, "config", "mode");
  if (!mode.is_string()) fail("mode: expected a string");
  const std::string mode_s = mode.get<std::string>();
  if (mode_s == "full-state")
    cfg.mode = Mode::kFullState;
  else if (mode_s == "partial-state")
    cfg.mode = Mode::kPartialState;
  else
    fail("mode: expected \"full-state\" or \"partial-state\"");

  if (j.contains("zeta_bar_form")) {
    const json& zf = j.at("zeta_bar_form");
    if (!zf.is_string()) fail("zeta_bar_form: expected a string");
    const std::string zf_s = zf.get<std::string>();
    if (zf_s == "normalized")
      cfg.zeta_bar_form = ZetaBarForm::kNormalized;
    else if (zf_s == "literal")
      cfg.zeta_bar_form = ZetaBarForm::kLiteral;
    else
      fail("zeta_bar_form: expected \"normalized\" or \"literal\"");
  }

  const json& sim = require_key(j, "config", "sim");
  check_keys(sim, "sim",
             {"steps", "record_every", "seed", "init_low", "init_high",
              "agent_init", "exo_init", "controller_init"});
  if (sim.contains("steps")) {
    cfg.steps = get_int(sim.at("steps"), "sim.steps");
    if (cfg.steps < 1) fail("sim.steps: must be at least 1");
  }
  if (sim.contains("record_every")) {
    cfg.record_every = get_int(sim.at("record_every"), "sim.record_every");
    if (cfg.record_every < 1) fail("sim.record_every: must be at least 1");
  } else {
    cfg.record_every = nodes <= 10 ? 1 : 10;
  }

  const bool has_seed = sim.contains("seed");
  const bool has_explicit = sim.contains("agent_init");
  if (has_seed && has_explicit)
    fail("sim: give either seed or agent_init, not both");
  if (!has_seed && !has_explicit)
    fail("sim: need either seed or agent_init");
  if (has_seed) {
    const json& s = sim.at("seed");
    if (!s.is_number_integer() ||
        (!s.is_number_unsigned() && s.get<std::int64_t>() < 0))
      fail("sim.seed: expected a nonnegative integer");
    cfg.seed = s.get<std::uint64_t>();
    if (sim.contains("init_low")) cfg.init_low = get_double(sim.at("init_low"), "sim.init_low");
    if (sim.contains("init_high")) cfg.init_high = get_double(sim.at("init_high"), "sim.init_high");
    if (!(cfg.init_low < cfg.init_high)) fail("sim.init_low: must be below sim.init_high");
    if (sim.contains("exo_init")) fail("sim.exo_init: only valid together with agent_init");
  } else {
    if (sim.contains("init_low") || sim.contains("init_high"))
      fail("sim.init_low: only valid together with seed");
    cfg.agent_init = parse_state_list(sim.at("agent_init"), "sim.agent_init",
                                      nodes, 2 * cfg.n);
    if (!sim.contains("exo_init")) fail("sim.exo_init: required when agent_init is given");
    cfg.exo_init = parse_vector(sim.at("exo_init"), "sim.exo_init", 2 * cfg.n);
  }

  if (sim.contains("controller_init")) {
    const json& ci = sim.at("controller_init");
    check_keys(ci, "sim.controller_init", {"chi", "xhat"});
    if (ci.contains("chi"))
      cfg.chi_init = parse_state_list(ci.at("chi"), "sim.controller_init.chi",
                                      nodes, 2 * cfg.n);
    if (ci.contains("xhat")) {
      if (cfg.mode != Mode::kPartialState)
        fail("sim.controller_init.xhat: only applies to partial-state mode");
      cfg.xhat_init = parse_state_list(ci.at("xhat"), "sim.controller_init.xhat",
                                       nodes, 2 * cfg.n);
    }
  }

  return cfg;
}

std::string config_to_json(const SimConfig& cfg) {
  json j;
  j["plant"]["n"] = cfg.n;

  const int nodes = cfg.graph.n_nodes();
  j["graph"]["nodes"] = nodes;
  json edges = json::array();
  for (int from = 1; from <= nodes; ++from)
    for (int to = 1; to <= nodes; ++to) {
      const double w = cfg.graph.weights()(to - 1, from - 1);
      if (w > 0.0) edges.push_back(json::array({from, to, w}));
    }
  j["graph"]["edges"] = std::move(edges);

  json roots = json::array();
  std::set<int> sorted_roots(cfg.roots.begin(), cfg.roots.end());
  for (int r : sorted_roots) roots.push_back(r + 1);
  j["roots"] = std::move(roots);

  if (cfg.bounds) j["bounds"] = *cfg.bounds;

  j["gains"]["k1"] = cfg.gains.k1;
  j["gains"]["k2"] = cfg.gains.k2;
  j["gains"]["f1"] = cfg.gains.f1;
  j["gains"]["f2"] = cfg.gains.f2;

  j["mode"] = cfg.mode == Mode::kFullState ? "full-state" : "partial-state";
  j["zeta_bar_form"] =
      cfg.zeta_bar_form == ZetaBarForm::kNormalized ? "normalized" : "literal";

  json sim;
  sim["steps"] = cfg.steps;
  sim["record_every"] = cfg.record_every;
  if (cfg.agent_init) {
    json rows = json::array();
    for (const Vector& v : *cfg.agent_init) {
      json row = json::array();
      for (Eigen::Index k = 0; k < v.size(); ++k) row.push_back(v[k]);
      rows.push_back(std::move(row));
    }
    sim["agent_init"] = std::move(rows);
    json exo = json::array();
    for (Eigen::Index k = 0; k < cfg.exo_init->size(); ++k)
      exo.push_back((*cfg.exo_init)[k]);
    sim["exo_init"] = std::move(exo);
  } else {
    sim["seed"] = cfg.seed.value_or(0);
    sim["init_low"] = cfg.init_low;
    sim["init_high"] = cfg.init_high;
  }
  if (cfg.chi_init || cfg.xhat_init) {
    json ci;
    auto dump_list = [](const std::vector<Vector>& list) {
      json rows = json::array();
      for (const Vector& v : list) {
        json row = json::array();
        for (Eigen::Index k = 0; k < v.size(); ++k) row.push_back(v[k]);
        rows.push_back(std::move(row));
      }
      return rows;
    };
    if (cfg.chi_init) ci["chi"] = dump_list(*cfg.chi_init);
    if (cfg.xhat_init) ci["xhat"] = dump_list(*cfg.xhat_init);
    sim["controller_init"] = std::move(ci);
  }
  j["sim"] = std::move(sim);

  return j.dump(2) + "\n";
}

std::string trajectory_csv(const Trajectory& tr) {
  const int n = tr.n;
  std::ostringstream out;
  out << "t,agent_id";
  for (int k = 1; k <= 2 * n; ++k) out << ",x" << k;
  for (int k = 1; k <= 2 * n; ++k) out << ",xr" << k;
  for (int k = 1; k <= n; ++k) out << ",u" << k;
  for (int k = 1; k <= n; ++k) out << ",sat_u" << k;
  out << ",sync_error_inf\n";

  for (const Snapshot& s : tr.snapshots) {
    for (int i = 0; i < tr.n_agents; ++i) {
      const size_t k = static_cast<size_t>(i);
      out << s.t << ',' << (i + 1);
      for (Eigen::Index d = 0; d < 2 * n; ++d) out << ',' << fmt17(s.x[k][d]);
      for (Eigen::Index d = 0; d < 2 * n; ++d) out << ',' << fmt17(s.xr[d]);
      for (Eigen::Index d = 0; d < n; ++d) out << ',' << fmt17(s.u[k][d]);
      for (Eigen::Index d = 0; d < n; ++d) out << ',' << fmt17(s.sat_u[k][d]);
      out << ',' << fmt17(s.sync_error_inf) << '\n';
    }
  }
  return out.str();
}

std::string metrics_csv(const SimConfig& cfg, const SyncMetrics& m) {
  std::ostringstream out;
  out << "mode,n,agents,steps,final_sync_error_inf,first_below_1e-2,"
         "first_below_1e-4,first_below_1e-6,max_abs_u\n";
  out << (cfg.mode == Mode::kFullState ? "full-state" : "partial-state") << ','
      << cfg.n << ',' << cfg.graph.n_nodes() << ',' << cfg.steps << ','
      << fmt17(m.final_sync_error_inf) << ',';
  auto cell = [&out](const std::optional<int>& v) {
    if (v)
      out << *v;
    else
      out << "never";
  };
  cell(m.first_below_1e2);
  out << ',';
  cell(m.first_below_1e4);
  out << ',';
  cell(m.first_below_1e6);
  out << ',' << fmt17(m.max_abs_u) << '\n';
  return out.str();
}

std::string certification_text(const CertificationReport& rep) {
  std::ostringstream out;
  out << "synchronization certificate\n";
  out << "  mode:                 "
      << (rep.mode == Mode::kFullState ? "full-state" : "partial-state") << '\n';
  out << "  agents:               " << rep.n_agents << " (n = " << rep.n << ")\n";
  out << "  gains:                k1 = " << fmt12(rep.gains.k1)
      << ", k2 = " << fmt12(rep.gains.k2) << ", f1 = " << fmt12(rep.gains.f1)
      << ", f2 = " << fmt12(rep.gains.f2) << '\n';
  out << "  graph in reach set:   " << (rep.graph_in_set ? "yes" : "no") << '\n';
  out << "  gains in region:      " << (rep.gains_in_region ? "yes" : "no") << '\n';
  out << "  rho(Dbar):            " << fmt12(rep.rho_dbar) << '\n';
  out << "  rho(Dbar kron A):     " << fmt12(rep.rho_dbar_kron_a) << '\n';
  if (rep.rho_observer)
    out << "  rho(A - F C):         " << fmt12(*rep.rho_observer) << '\n';
  out << "  energy residual:      " << fmt12(rep.pd_residual) << '\n';
  out << "  energy min eig:       " << fmt12(rep.pd_min_eig) << '\n';
  out << "  ||Dbar kron A - I||:  " << fmt12(rep.psi_norm) << '\n';
  if (rep.h)
    out << "  blend weight h:       " << fmt12(*rep.h) << '\n';
  else
    out << "  blend weight h:       none found\n";
  if (rep.phi_eigs)
    out << "  Phi eigenvalues:      " << fmt12(rep.phi_eigs->first) << ", "
        << fmt12(rep.phi_eigs->second) << '\n';
  out << "  result:               " << (rep.pass ? "PASS" : "FAIL") << '\n';
  for (const std::string& r : rep.reasons) out << "  reason: " << r << '\n';
  return out.str();
}

std::string certification_json(const CertificationReport& rep) {
  json j;
  j["mode"] = rep.mode == Mode::kFullState ? "full-state" : "partial-state";
  j["n"] = rep.n;
  j["agents"] = rep.n_agents;
  j["gains"]["k1"] = rep.gains.k1;
  j["gains"]["k2"] = rep.gains.k2;
  j["gains"]["f1"] = rep.gains.f1;
  j["gains"]["f2"] = rep.gains.f2;
  j["graph_in_set"] = rep.graph_in_set;
  j["gains_in_region"] = rep.gains_in_region;
  j["rho_dbar"] = rep.rho_dbar;
  j["rho_dbar_kron_a"] = rep.rho_dbar_kron_a;
  j["rho_observer"] = rep.rho_observer ? json(*rep.rho_observer) : json(nullptr);
  j["pd_residual"] = json_or_null(rep.pd_residual);
  j["pd_min_eig"] = json_or_null(rep.pd_min_eig);
  j["psi_norm"] = rep.psi_norm;
  j["h"] = rep.h ? json(*rep.h) : json(nullptr);
  j["phi_eigs"] = rep.phi_eigs
                      ? json::array({rep.phi_eigs->first, rep.phi_eigs->second})
                      : json(nullptr);
  j["pass"] = rep.pass;
  j["reasons"] = rep.reasons;
  return j.dump(2) + "\n";
}

std::string lyapunov_csv(const LyapunovTrace& trace) {
  std::ostringstream out;
  out << "t,v1,v2,v,dv\n";
  for (size_t k = 0; k < trace.t.size(); ++k) {
    out << trace.t[k] << ',' << fmt17(trace.v1[k]) << ',' << fmt17(trace.v2[k])
        << ',' << fmt17(trace.v[k]) << ',';
    if (k < trace.dv.size()) out << fmt17(trace.dv[k]);
    out << '\n';
  }
  return out.str();
}

std::string fnv1a64_hex(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string run_manifest_json(const SimConfig& cfg, const std::string& config_text,
                              const std::string& out_dir) {
  json j;
  j["tool"] = "satsync";
  j["version"] = kVersion;
  std::time_t now = std::time(nullptr);
  char stamp[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  j["created_utc"] = stamp;
  j["config_hash"] = fnv1a64_hex(config_text);
  j["mode"] = cfg.mode == Mode::kFullState ? "full-state" : "partial-state";
  j["n"] = cfg.n;
  j["agents"] = cfg.graph.n_nodes();
  j["steps"] = cfg.steps;
  j["record_every"] = cfg.record_every;
  j["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
  j["output_dir"] = out_dir;
  j["outputs"]["config"] = "config.json";
  j["outputs"]["certification_text"] = "certification.txt";
  j["outputs"]["certification_json"] = "certification.json";
  j["outputs"]["trajectory"] = "trajectory.csv";
  j["outputs"]["metrics"] = "metrics.csv";
  return j.dump(2) + "\n";
}

SimConfig make_case_config(const std::string& case_id, int gains_id) {
  int nodes = 0;
  std::vector<std::pair<int, int>> edges;  // 1-based (from, to)
  if (case_id == "I") {
    nodes = 3;
    edges = {{1, 2}, {2, 3}};
  } else if (case_id == "II") {
    nodes = 6;
    edges = {{1, 2}, {2, 3}, {3, 1}, {3, 4}, {6, 3}, {4, 5}, {5, 6}};
  } else if (case_id == "III") {
    nodes = 60;
    for (int i = 1; i < 60; ++i) edges.push_back({i, i + 1});
    edges.push_back({60, 1});
  } else {
    fail("case id must be \"I\", \"II\" or \"III\"");
  }

  SimConfig cfg;
  Matrix weights = Matrix::Zero(nodes, nodes);
  for (auto [from, to] : edges) weights(to - 1, from - 1) = 1.0;
  cfg.graph = Graph(nodes, weights);
  cfg.roots = {0};
  cfg.n = 1;
  cfg.mode = Mode::kPartialState;

  switch (gains_id) {
    case 1:
      cfg.gains.k1 = 0.5;
      cfg.gains.k2 = 1.0;
      break;
    case 2:
      cfg.gains.k1 = 1.0;
      cfg.gains.k2 = 2.0;
      break;
    case 3:
      cfg.gains.k1 = 1.5;
      cfg.gains.k2 = 2.5;
      break;
    default:
      fail("gains id must be 1, 2 or 3");
  }
  cfg.gains.f1 = 1.5;
  cfg.gains.f2 = 0.5;

  cfg.steps = 5000;
  cfg.record_every = nodes <= 10 ? 1 : 10;
  cfg.seed = 42;
  cfg.init_low = -10.0;
  cfg.init_high = 10.0;
  return cfg;
}

SuiteResult run_suite(const std::string& case_id, int gains_id,
                      const SuiteOptions& options) {
  SimConfig cfg = make_case_config(case_id, gains_id);
  if (options.seed) cfg.seed = *options.seed;
  if (options.steps) cfg.steps = *options.steps;

  SuiteResult result;
  result.run_dir =
      options.output_dir / ("case" + case_id + "-gains" + std::to_string(gains_id));
  std::filesystem::create_directories(result.run_dir);

  const std::string config_text = config_to_json(cfg);
  write_file(result.run_dir / "config.json", config_text);
  write_file(result.run_dir / "manifest.json",
             run_manifest_json(cfg, config_text, result.run_dir.string()));

  result.report = certify(cfg);
  write_file(result.run_dir / "certification.txt", certification_text(result.report));
  write_file(result.run_dir / "certification.json", certification_json(result.report));

  if (!result.report.pass && !options.force) {
    result.exit_code = 1;
    return result;
  }

  const Trajectory tr = run(cfg, options.force);
  result.metrics = sync_metrics(tr);
  write_file(result.run_dir / "trajectory.csv", trajectory_csv(tr));
  write_file(result.run_dir / "metrics.csv", metrics_csv(cfg, result.metrics));

  result.exit_code = result.report.pass ? 0 : 1;
  return result;
}

}  // namespace satsync
