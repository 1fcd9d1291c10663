#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "satsync/certify.hpp"
#include "satsync/sim.hpp"

namespace satsync {

// Raised on schema violations; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parse a JSON run configuration. Node indices in the file are 1-based;
// unknown keys are errors. With enforce_gain_region set, gains outside the
// admissible region are rejected at parse time.
SimConfig parse_config(const std::string& text, bool enforce_gain_region = true);

// Inverse of parse_config, canonical field order, 2-space indent.
std::string config_to_json(const SimConfig& cfg);

// CSV with 17 significant digits so values survive a round trip exactly.
// Columns: t, agent_id, state, reference state, raw and saturated inputs,
// per-snapshot worst error.
std::string trajectory_csv(const Trajectory& tr);

std::string metrics_csv(const SimConfig& cfg, const SyncMetrics& m);

std::string certification_text(const CertificationReport& rep);
std::string certification_json(const CertificationReport& rep);

std::string lyapunov_csv(const LyapunovTrace& trace);

// FNV-1a over the raw config text, 16 hex digits.
std::string fnv1a64_hex(const std::string& text);

// Written before the simulation starts so an interrupted run still leaves a
// record of what was attempted.
std::string run_manifest_json(const SimConfig& cfg, const std::string& config_text,
                              const std::string& out_dir);

// Built-in benchmark networks: a 3-node chain ("I"), a 6-node mesh with one
// two-parent node ("II") and a 60-node directed loop ("III"), each paired
// with one of three gain pairs (1..3). Partial-state mode, node 1 rooted.
SimConfig make_case_config(const std::string& case_id, int gains_id);

struct SuiteOptions {
  std::filesystem::path output_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> steps;
  bool force = false;
};

struct SuiteResult {
  int exit_code = 1;
  std::filesystem::path run_dir;
  CertificationReport report;
  SyncMetrics metrics;
};

// Certify, then simulate, writing config, manifest, certification reports,
// trajectory and metrics under <output_dir>/case<id>-gains<id>/. Exit code 0
// only when certification passed and the simulation completed.
SuiteResult run_suite(const std::string& case_id, int gains_id,
                      const SuiteOptions& options);

}  // namespace satsync
