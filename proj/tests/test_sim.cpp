#include "doctest.h"

#include <random>

#include "satsync/dynamics.hpp"
#include "satsync/io.hpp"
#include "satsync/sim.hpp"

using namespace satsync;

namespace {

SimConfig single_agent_config(Mode mode) {
  SimConfig cfg;
  cfg.n = 1;
  cfg.graph = Graph(1, Matrix::Zero(1, 1));
  cfg.roots = {0};
  cfg.gains = GainSet{1.0, 2.0, 1.5, 0.5};
  cfg.mode = mode;
  cfg.steps = 50;
  cfg.record_every = 1;
  Vector xr(2);
  xr << 3.0, -0.25;
  cfg.agent_init = std::vector<Vector>{xr};
  cfg.exo_init = xr;
  return cfg;
}

Vector stacked_error(const Snapshot& s, int n) {
  Vector e(2 * n * static_cast<int>(s.x.size()));
  for (size_t i = 0; i < s.x.size(); ++i)
    e.segment(static_cast<Eigen::Index>(2 * n * i), 2 * n) =
        s.x[i] - s.xr - s.chi[i];
  return e;
}

}  // namespace

TEST_CASE("seeded initial states are reproducible and in range") {
  auto a = seeded_states(99, 4, 2, -10.0, 10.0);
  auto b = seeded_states(99, 4, 2, -10.0, 10.0);
  REQUIRE(a.size() == 4);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK((a[i] - b[i]).norm() == 0.0);
    for (Eigen::Index d = 0; d < a[i].size(); ++d) {
      CHECK(a[i][d] >= -10.0);
      CHECK(a[i][d] < 10.0);
    }
  }
  auto c = seeded_states(100, 4, 2, -10.0, 10.0);
  CHECK((a[0] - c[0]).norm() != 0.0);
  CHECK_THROWS_AS(seeded_states(1, 2, 2, 5.0, 5.0), std::invalid_argument);
}

TEST_CASE("an agent starting on the reference stays on it") {
  for (Mode mode : {Mode::kFullState, Mode::kPartialState}) {
    Trajectory tr = run(single_agent_config(mode));
    REQUIRE(tr.snapshots.size() == 51);
    for (const Snapshot& s : tr.snapshots) {
      CHECK(s.sync_error_inf == 0.0);
      CHECK(s.u[0].norm() == 0.0);
    }
  }
}

TEST_CASE("recording grid always includes the final state") {
  SimConfig cfg = make_case_config("I", 1);
  cfg.steps = 10;
  for (auto [every, want] : std::vector<std::pair<int, size_t>>{
           {1, 11}, {2, 6}, {3, 5}, {10, 2}, {20, 2}}) {
    cfg.record_every = every;
    Trajectory tr = run(cfg);
    CHECK(tr.snapshots.size() == want);
    CHECK(tr.snapshots.front().t == 0);
    CHECK(tr.snapshots.back().t == 10);
  }
}

TEST_CASE("stock chain network synchronizes to the reference") {
  SimConfig cfg = make_case_config("I", 1);
  Trajectory tr = run(cfg);
  SyncMetrics m = sync_metrics(tr);
  CHECK(m.final_sync_error_inf < 1e-6);
  CHECK(m.first_below_1e2.has_value());
  CHECK(m.first_below_1e6.has_value());
  CHECK(*m.first_below_1e2 <= *m.first_below_1e6);
  CHECK(m.max_abs_u > 1.0);  // the run must actually hit the limiter
}

TEST_CASE("full-state disagreement follows the network matrix exactly") {
  SimConfig cfg = make_case_config("I", 2);
  cfg.mode = Mode::kFullState;
  cfg.steps = 200;
  Trajectory tr = run(cfg);
  REQUIRE(tr.snapshots.size() == 201);

  RootSet roots(cfg.roots, cfg.graph.n_nodes());
  NetworkMatrices nm = build_network_matrices(cfg.graph, roots,
                                              DegreeBounds::tight(cfg.graph));
  Matrix big = kron(nm.dbar, plant_a(cfg.n));

  Vector predicted = stacked_error(tr.snapshots[0], cfg.n);
  for (size_t k = 1; k < tr.snapshots.size(); ++k) {
    predicted = big * predicted;
    Vector actual = stacked_error(tr.snapshots[k], cfg.n);
    CHECK((actual - predicted).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("observer error contracts through A - F C exactly") {
  // the observer reconstructs the weighted local disagreement, so its error
  // is (I - Dbar) applied to the stacked deviations minus xhat
  SimConfig cfg = make_case_config("I", 1);
  cfg.steps = 200;
  Trajectory tr = run(cfg);
  REQUIRE(tr.snapshots.size() == 201);
  REQUIRE(!tr.snapshots[0].xhat.empty());

  RootSet roots(cfg.roots, cfg.graph.n_nodes());
  NetworkMatrices nm = build_network_matrices(cfg.graph, roots,
                                              DegreeBounds::tight(cfg.graph));
  const int agents = cfg.graph.n_nodes();
  Matrix mix = Matrix::Identity(agents, agents) - nm.dbar;
  Matrix obs = observer_error_matrix(cfg.n, cfg.gains.f1, cfg.gains.f2);

  auto observer_error = [&](const Snapshot& s) {
    std::vector<Vector> e;
    for (int i = 0; i < agents; ++i) {
      Vector acc = -s.xhat[static_cast<size_t>(i)];
      for (int j = 0; j < agents; ++j)
        acc += mix(i, j) * (s.x[static_cast<size_t>(j)] - s.xr);
      e.push_back(acc);
    }
    return e;
  };

  std::vector<Vector> predicted = observer_error(tr.snapshots[0]);
  for (size_t t = 1; t < tr.snapshots.size(); ++t) {
    std::vector<Vector> actual = observer_error(tr.snapshots[t]);
    for (int i = 0; i < agents; ++i) {
      const size_t k = static_cast<size_t>(i);
      predicted[k] = obs * predicted[k];
      CHECK((actual[k] - predicted[k]).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("identical configs give byte-identical trajectories") {
  SimConfig cfg = make_case_config("II", 3);
  cfg.steps = 400;
  const std::string a = trajectory_csv(run(cfg));
  const std::string b = trajectory_csv(run(cfg));
  CHECK(a == b);
  CHECK(a.size() > 1000);
}

TEST_CASE("bad gains are refused unless forced") {
  SimConfig cfg = make_case_config("I", 1);
  cfg.gains.k1 = 1.0;
  cfg.gains.k2 = 0.5;
  cfg.steps = 20;
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);

  Trajectory tr = run(cfg, /*force=*/true);
  REQUIRE(!tr.warnings.empty());
  CHECK(tr.warnings[0].find("gain") != std::string::npos);
}

TEST_CASE("an unstable observer is refused unless forced") {
  SimConfig cfg = make_case_config("I", 1);
  cfg.gains.f1 = 0.0;
  cfg.gains.f2 = 0.0;
  cfg.steps = 20;
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);

  Trajectory tr = run(cfg, /*force=*/true);
  REQUIRE(!tr.warnings.empty());
  CHECK(tr.warnings[0].find("observer") != std::string::npos);

  // full-state mode has no observer, so the same gains sail through
  cfg.mode = Mode::kFullState;
  CHECK_NOTHROW(run(cfg));
}

TEST_CASE("unreachable nodes produce a warning, not a refusal") {
  SimConfig cfg = make_case_config("I", 1);
  cfg.roots = {2};
  cfg.steps = 20;
  Trajectory tr = run(cfg);
  REQUIRE(!tr.warnings.empty());
  CHECK(tr.warnings[0].find("reachable") != std::string::npos);
}

TEST_CASE("sync metrics pick the first recorded crossing times") {
  Trajectory tr;
  tr.n = 1;
  tr.n_agents = 1;
  auto snap = [](int t, double err, double u) {
    Snapshot s;
    s.t = t;
    s.sync_error_inf = err;
    s.u.push_back(Vector::Constant(1, u));
    s.sat_u.push_back(Vector::Constant(1, saturate(u)));
    return s;
  };
  tr.snapshots.push_back(snap(0, 1.0, -4.0));
  tr.snapshots.push_back(snap(1, 5e-3, 2.0));
  tr.snapshots.push_back(snap(2, 5e-5, 0.5));
  tr.snapshots.push_back(snap(3, 2e-5, 0.1));

  SyncMetrics m = sync_metrics(tr);
  CHECK(m.final_sync_error_inf == 2e-5);
  CHECK(m.first_below_1e2.value() == 1);
  CHECK(m.first_below_1e4.value() == 2);
  CHECK(!m.first_below_1e6.has_value());
  CHECK(m.max_abs_u == 4.0);
}

TEST_CASE("certified random networks synchronize within the stock horizon") {
  std::mt19937 gen(71);
  std::uniform_real_distribution<double> weight(0.5, 1.5);
  for (int trial = 0; trial < 3; ++trial) {
    const int n = 3 + static_cast<int>(gen() % 5);
    Matrix w = Matrix::Zero(n, n);
    // chain backbone from node 0 plus a few extra edges
    for (int i = 1; i < n; ++i) w(i, i - 1) = weight(gen);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && w(i, j) == 0.0 && gen() % 4 == 0) w(i, j) = weight(gen);

    SimConfig cfg;
    cfg.n = 1;
    cfg.graph = Graph(n, w);
    cfg.roots = {0};
    cfg.gains = trial % 2 == 0 ? GainSet{0.5, 1.0, 1.5, 0.5}
                               : GainSet{1.0, 2.0, 1.5, 0.5};
    cfg.mode = trial % 2 == 0 ? Mode::kPartialState : Mode::kFullState;
    cfg.steps = 5000;
    cfg.record_every = 10;
    cfg.seed = 1000 + static_cast<std::uint64_t>(trial);

    Trajectory tr = run(cfg);
    CHECK(tr.warnings.empty());
    CHECK(sync_metrics(tr).final_sync_error_inf < 1e-6);
  }
}

TEST_CASE("the slow 60-node loop gets there on a longer horizon") {
  // at the stock 5000 steps this network is still around 1e-4; with 8000 it
  // lands well inside the target band
  SimConfig cfg = make_case_config("III", 1);
  cfg.steps = 8000;
  SyncMetrics m = sync_metrics(run(cfg));
  CHECK(m.final_sync_error_inf < 1e-6);
}

TEST_CASE("explicit initial conditions are validated") {
  SimConfig cfg = make_case_config("I", 1);
  cfg.seed.reset();
  cfg.agent_init = std::vector<Vector>{Vector::Zero(2), Vector::Zero(2)};
  cfg.exo_init = Vector::Zero(2);
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);  // one state short

  cfg.agent_init =
      std::vector<Vector>{Vector::Zero(2), Vector::Zero(2), Vector::Zero(2)};
  cfg.exo_init = Vector::Zero(3);
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);  // odd reference size

  cfg.exo_init = Vector::Zero(2);
  CHECK_NOTHROW(run(cfg));

  cfg.mode = Mode::kFullState;
  cfg.xhat_init = std::vector<Vector>{Vector::Zero(2), Vector::Zero(2),
                                      Vector::Zero(2)};
  CHECK_THROWS_AS(run(cfg), std::invalid_argument);  // no observer to seed
}
