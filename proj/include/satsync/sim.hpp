#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "satsync/graph.hpp"
#include "satsync/protocol.hpp"

namespace satsync {

enum class Mode {
  kFullState,     // agents measure their whole state
  kPartialState,  // agents measure position only and run an observer
};

// Everything needed to reproduce a run. Either seeded initial conditions
// (seed / init_low / init_high) or explicit ones (agent_init + exo_init) are
// set, never both.
struct SimConfig {
  int n = 1;  // input dimension; the plant state has dimension 2n
  Graph graph;
  std::vector<int> roots;                     // 0-based node indices
  std::optional<std::vector<double>> bounds;  // degree bounds, default tight
  GainSet gains;
  Mode mode = Mode::kPartialState;
  ZetaBarForm zeta_bar_form = ZetaBarForm::kNormalized;

  int steps = 5000;
  int record_every = 1;
  std::optional<std::uint64_t> seed;
  double init_low = -10.0;
  double init_high = 10.0;
  std::optional<std::vector<Vector>> agent_init;   // N states of size 2n
  std::optional<Vector> exo_init;                  // size 2n
  std::optional<std::vector<Vector>> chi_init;     // N of size 2n
  std::optional<std::vector<Vector>> xhat_init;    // N of size 2n, partial mode

  SimConfig() : graph(1, Matrix::Zero(1, 1)) {}
};

struct Snapshot {
  int t = 0;
  std::vector<Vector> x;       // agent states, size 2n each
  Vector xr;                   // reference state
  std::vector<Vector> chi;     // controller states
  std::vector<Vector> xhat;    // observer states, empty in full-state mode
  std::vector<Vector> u;       // raw controls
  std::vector<Vector> sat_u;   // saturated controls
  double sync_error_inf = 0.0; // max_i ||x_i - xr||_inf
};

struct Trajectory {
  int n = 1;
  int n_agents = 1;
  Mode mode = Mode::kPartialState;
  std::vector<Snapshot> snapshots;
  std::vector<std::string> warnings;
};

struct SyncMetrics {
  double final_sync_error_inf = 0.0;
  std::optional<int> first_below_1e2;
  std::optional<int> first_below_1e4;
  std::optional<int> first_below_1e6;
  double max_abs_u = 0.0;
};

// Run the closed loop for cfg.steps ticks, recording every record_every ticks
// and always the final state. Refuses gains outside the admissible region and
// an unstable observer unless force is set; an unreachable graph only warns.
Trajectory run(const SimConfig& cfg, bool force = false);

SyncMetrics sync_metrics(const Trajectory& tr);

// mt19937_64 mapped to [low, high); agents are drawn in index order, the
// reference last, so runs with the same seed are reproducible bit for bit.
std::vector<Vector> seeded_states(std::uint64_t seed, int count, int dim,
                                  double low, double high);

}  // namespace satsync
