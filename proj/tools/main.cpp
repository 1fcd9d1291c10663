#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "satsync/io.hpp"
#include "satsync/version.hpp"

namespace fs = std::filesystem;
using namespace satsync;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

struct RunFlags {
  std::string config_path;
  std::string output_dir = "out";
  std::optional<std::int64_t> seed;
  std::optional<int> steps;
  bool force = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& flags, bool with_force) {
  cmd->add_option("config", flags.config_path, "run configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--output-dir", flags.output_dir, "directory for run outputs");
  cmd->add_option("--seed", flags.seed, "override the configured seed");
  cmd->add_option("--steps", flags.steps, "override the configured step count");
  if (with_force)
    cmd->add_flag("--force", flags.force,
                  "run even if certification checks fail");
}

SimConfig load_config(const RunFlags& flags, bool enforce_gain_region) {
  SimConfig cfg = parse_config(read_file(flags.config_path), enforce_gain_region);
  if (flags.seed) {
    if (cfg.agent_init)
      throw ConfigError("--seed: the configuration uses explicit initial states");
    cfg.seed = static_cast<std::uint64_t>(*flags.seed);
  }
  if (flags.steps) {
    if (*flags.steps < 1) throw ConfigError("--steps: must be at least 1");
    cfg.steps = *flags.steps;
  }
  return cfg;
}

// Shared by simulate and lyapunov: certify, refuse or warn, run, write files.
int do_simulate(const RunFlags& flags, bool with_energy_trace) {
  SimConfig cfg = load_config(flags, /*enforce_gain_region=*/!flags.force);
  if (with_energy_trace) cfg.record_every = 1;

  const fs::path dir(flags.output_dir);
  fs::create_directories(dir);
  const std::string config_text = config_to_json(cfg);
  write_file(dir / "config.json", config_text);
  write_file(dir / "manifest.json",
             run_manifest_json(cfg, config_text, dir.string()));

  const CertificationReport rep = certify(cfg);
  write_file(dir / "certification.txt", certification_text(rep));
  write_file(dir / "certification.json", certification_json(rep));
  if (!rep.pass) {
    std::cerr << "certification failed:\n";
    for (const std::string& r : rep.reasons) std::cerr << "  " << r << '\n';
    if (with_energy_trace) {
      std::cerr << "energy trace needs a passing certificate\n";
      return 1;
    }
  }

  Trajectory tr;
  try {
    tr = run(cfg, flags.force);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n(use --force to run anyway)\n";
    return 1;
  }
  for (const std::string& w : tr.warnings) std::cerr << "warning: " << w << '\n';

  const SyncMetrics m = sync_metrics(tr);
  write_file(dir / "trajectory.csv", trajectory_csv(tr));
  write_file(dir / "metrics.csv", metrics_csv(cfg, m));
  if (with_energy_trace)
    write_file(dir / "energy.csv", lyapunov_csv(lyapunov_trace(tr, rep)));

  std::cout << "final sync error: " << m.final_sync_error_inf << '\n';
  std::cout << "outputs in " << dir.string() << '\n';
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and certification for saturated double-integrator "
               "synchronization"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunFlags sim_flags;
  CLI::App* sim_cmd = app.add_subcommand(
      "simulate", "run a closed-loop simulation from a config file");
  add_run_flags(sim_cmd, sim_flags, /*with_force=*/true);

  std::string certify_config;
  std::string certify_outdir;
  CLI::App* cert_cmd = app.add_subcommand(
      "certify", "evaluate the synchronization conditions for a config file");
  cert_cmd->add_option("config", certify_config, "run configuration (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cert_cmd->add_option("--output-dir", certify_outdir,
                       "also write certification.{txt,json} here");

  std::string suite_case;
  int suite_gains = 0;
  RunFlags suite_flags;
  CLI::App* suite_cmd = app.add_subcommand(
      "suite", "run a built-in benchmark case with one of the stock gain pairs");
  suite_cmd->add_option("case", suite_case, "benchmark network: I, II or III")
      ->required()
      ->check(CLI::IsMember({"I", "II", "III"}));
  suite_cmd->add_option("gains", suite_gains, "gain pair: 1, 2 or 3")
      ->required()
      ->check(CLI::Range(1, 3));
  suite_cmd->add_option("--output-dir", suite_flags.output_dir,
                        "directory for run outputs");
  suite_cmd->add_option("--seed", suite_flags.seed, "override the stock seed");
  suite_cmd->add_option("--steps", suite_flags.steps, "override the step count");
  suite_cmd->add_flag("--force", suite_flags.force,
                      "run even if certification checks fail");

  RunFlags lyap_flags;
  CLI::App* lyap_cmd = app.add_subcommand(
      "lyapunov", "simulate at full recording and emit the energy trace");
  add_run_flags(lyap_cmd, lyap_flags, /*with_force=*/false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(sim_cmd)) return do_simulate(sim_flags, false);
    if (app.got_subcommand(lyap_cmd)) return do_simulate(lyap_flags, true);
    if (app.got_subcommand(cert_cmd)) {
      const SimConfig cfg =
          parse_config(read_file(certify_config), /*enforce_gain_region=*/false);
      const CertificationReport rep = certify(cfg);
      std::cout << certification_text(rep);
      if (!certify_outdir.empty()) {
        fs::create_directories(certify_outdir);
        write_file(fs::path(certify_outdir) / "certification.txt",
                   certification_text(rep));
        write_file(fs::path(certify_outdir) / "certification.json",
                   certification_json(rep));
      }
      return rep.pass ? 0 : 1;
    }
    if (app.got_subcommand(suite_cmd)) {
      SuiteOptions opts;
      opts.output_dir = suite_flags.output_dir;
      if (suite_flags.seed)
        opts.seed = static_cast<std::uint64_t>(*suite_flags.seed);
      opts.steps = suite_flags.steps;
      opts.force = suite_flags.force;
      const SuiteResult res = run_suite(suite_case, suite_gains, opts);
      std::cout << certification_text(res.report);
      if (res.exit_code == 0 || opts.force)
        std::cout << "final sync error: " << res.metrics.final_sync_error_inf
                  << '\n';
      std::cout << "outputs in " << res.run_dir.string() << '\n';
      return res.exit_code;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
