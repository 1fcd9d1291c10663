#include "satsync/sim.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "satsync/dynamics.hpp"

namespace satsync {

std::vector<Vector> seeded_states(std::uint64_t seed, int count, int dim,
                                  double low, double high) {
  if (count < 0 || dim < 1)
    throw std::invalid_argument("seeded_states: bad count or dimension");
  if (!(low < high))
    throw std::invalid_argument("seeded_states: need low < high");
  std::mt19937_64 gen(seed);
  // Fixed bit-to-double mapping (53-bit mantissa) so the draw sequence is
  // identical across standard library implementations.
  auto u01 = [&gen]() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  std::vector<Vector> out;
  out.reserve(static_cast<size_t>(count));
  for (int s = 0; s < count; ++s) {
    Vector v(dim);
    for (int d = 0; d < dim; ++d) v[d] = low + (high - low) * u01();
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

double worst_error(const std::vector<Vector>& x, const Vector& xr) {
  double err = 0.0;
  for (const Vector& xi : x)
    err = std::max(err, (xi - xr).cwiseAbs().maxCoeff());
  return err;
}

void check_state_list(const std::vector<Vector>& list, int n_agents, int dim,
                      const char* field) {
  if (static_cast<int>(list.size()) != n_agents)
    throw std::invalid_argument(std::string(field) + ": need one entry per agent");
  for (const Vector& v : list)
    if (v.size() != dim)
      throw std::invalid_argument(std::string(field) + ": entries must have size " +
                                  std::to_string(dim));
}

}  // namespace

Trajectory run(const SimConfig& cfg, bool force) {
  if (cfg.n < 1) throw std::invalid_argument("run: n must be positive");
  if (cfg.steps < 1) throw std::invalid_argument("run: steps must be positive");
  if (cfg.record_every < 1)
    throw std::invalid_argument("run: record_every must be positive");

  const int n = cfg.n;
  const int n_agents = cfg.graph.n_nodes();
  const RootSet roots(cfg.roots, n_agents);
  const DegreeBounds bounds = cfg.bounds
                                  ? DegreeBounds(cfg.graph, *cfg.bounds)
                                  : DegreeBounds::tight(cfg.graph);

  Trajectory tr;
  tr.n = n;
  tr.n_agents = n_agents;
  tr.mode = cfg.mode;

  if (!gain_region_contains(cfg.gains.k1, cfg.gains.k2)) {
    if (!force)
      throw std::invalid_argument(
          "run: gains outside the admissible gain region");
    tr.warnings.push_back("gains outside the admissible gain region (forced)");
  }
  if (cfg.mode == Mode::kPartialState) {
    const double rho_obs =
        spectral_radius(observer_error_matrix(n, cfg.gains.f1, cfg.gains.f2));
    if (rho_obs >= 1.0) {
      if (!force)
        throw std::invalid_argument(
            "run: observer matrix is not Schur stable (rho = " +
            std::to_string(rho_obs) + ")");
      tr.warnings.push_back("observer matrix is not Schur stable (forced)");
    }
  }
  if (!in_graph_set(cfg.graph, roots))
    tr.warnings.push_back(
        "not every node is reachable from the root set; synchronization is "
        "not guaranteed");

  // Initial conditions: explicit lists win, otherwise a seeded draw with the
  // agents first and the reference last.
  std::vector<Vector> x;
  Vector xr;
  if (cfg.agent_init) {
    check_state_list(*cfg.agent_init, n_agents, 2 * n, "agent_init");
    if (!cfg.exo_init)
      throw std::invalid_argument("run: agent_init requires exo_init");
    if (cfg.exo_init->size() != 2 * n)
      throw std::invalid_argument("run: exo_init must have size 2n");
    x = *cfg.agent_init;
    xr = *cfg.exo_init;
  } else {
    if (!cfg.seed)
      throw std::invalid_argument("run: need either a seed or explicit initial states");
    std::vector<Vector> draws =
        seeded_states(*cfg.seed, n_agents + 1, 2 * n, cfg.init_low, cfg.init_high);
    x.assign(draws.begin(), draws.end() - 1);
    xr = draws.back();
  }

  std::vector<FullStateController> full_ctrl;
  std::vector<PartialStateController> partial_ctrl;
  for (int i = 0; i < n_agents; ++i) {
    if (cfg.mode == Mode::kFullState)
      full_ctrl.emplace_back(n, roots.contains(i), bounds[i], cfg.gains);
    else
      partial_ctrl.emplace_back(n, roots.contains(i), bounds[i], cfg.gains);
  }
  if (cfg.chi_init) {
    check_state_list(*cfg.chi_init, n_agents, 2 * n, "chi_init");
    for (int i = 0; i < n_agents; ++i) {
      if (cfg.mode == Mode::kFullState)
        full_ctrl[static_cast<size_t>(i)].set_chi((*cfg.chi_init)[static_cast<size_t>(i)]);
      else
        partial_ctrl[static_cast<size_t>(i)].set_chi((*cfg.chi_init)[static_cast<size_t>(i)]);
    }
  }
  if (cfg.xhat_init) {
    if (cfg.mode != Mode::kPartialState)
      throw std::invalid_argument("run: xhat_init only applies to partial-state mode");
    check_state_list(*cfg.xhat_init, n_agents, 2 * n, "xhat_init");
    for (int i = 0; i < n_agents; ++i)
      partial_ctrl[static_cast<size_t>(i)].set_xhat((*cfg.xhat_init)[static_cast<size_t>(i)]);
  }

  auto chi_of = [&](int i) -> const Vector& {
    return cfg.mode == Mode::kFullState ? full_ctrl[static_cast<size_t>(i)].chi()
                                        : partial_ctrl[static_cast<size_t>(i)].chi();
  };

  const size_t un = static_cast<size_t>(n_agents);
  std::vector<Vector> u(un), su(un), zbar(un), zhat_chi(un), zhat_sat(un);

  for (int t = 0; t <= cfg.steps; ++t) {
    // Controls come from the pre-update controller states; the saturated
    // value is computed once and reused by plant, controllers and log.
    for (int i = 0; i < n_agents; ++i) {
      u[static_cast<size_t>(i)] = cfg.mode == Mode::kFullState
                                      ? full_ctrl[static_cast<size_t>(i)].control()
                                      : partial_ctrl[static_cast<size_t>(i)].control();
      su[static_cast<size_t>(i)] = saturate(u[static_cast<size_t>(i)]);
    }

    if (t % cfg.record_every == 0 || t == cfg.steps) {
      Snapshot snap;
      snap.t = t;
      snap.x = x;
      snap.xr = xr;
      for (int i = 0; i < n_agents; ++i) snap.chi.push_back(chi_of(i));
      if (cfg.mode == Mode::kPartialState)
        for (int i = 0; i < n_agents; ++i)
          snap.xhat.push_back(partial_ctrl[static_cast<size_t>(i)].xhat());
      snap.u = u;
      snap.sat_u = su;
      snap.sync_error_inf = worst_error(x, xr);
      tr.snapshots.push_back(std::move(snap));
    }
    if (t == cfg.steps) break;

    // All neighborhood signals are evaluated on the pre-update broadcasts,
    // then every controller and plant advances synchronously.
    std::vector<Vector> outputs(un), chis(un);
    Vector y_ref;
    if (cfg.mode == Mode::kFullState) {
      for (int i = 0; i < n_agents; ++i) outputs[static_cast<size_t>(i)] = x[static_cast<size_t>(i)];
      y_ref = xr;
    } else {
      for (int i = 0; i < n_agents; ++i)
        outputs[static_cast<size_t>(i)] = output(x[static_cast<size_t>(i)]);
      y_ref = output(xr);
    }
    for (int i = 0; i < n_agents; ++i) chis[static_cast<size_t>(i)] = chi_of(i);

    for (int i = 0; i < n_agents; ++i) {
      zbar[static_cast<size_t>(i)] = compute_zeta_bar(
          i, outputs, y_ref, cfg.graph, roots, bounds, cfg.zeta_bar_form);
      zhat_chi[static_cast<size_t>(i)] = compute_zeta_hat(i, chis, cfg.graph, bounds);
      if (cfg.mode == Mode::kPartialState)
        zhat_sat[static_cast<size_t>(i)] = compute_zeta_hat(i, su, cfg.graph, bounds);
    }

    for (int i = 0; i < n_agents; ++i) {
      const size_t k = static_cast<size_t>(i);
      if (cfg.mode == Mode::kFullState)
        full_ctrl[k].step(su[k], zbar[k], zhat_chi[k]);
      else
        partial_ctrl[k].step(su[k], zbar[k], zhat_chi[k], zhat_sat[k]);
      x[k] = agent_step(x[k], u[k]);
    }
    xr = exo_step(xr);
  }

  return tr;
}

SyncMetrics sync_metrics(const Trajectory& tr) {
  SyncMetrics m;
  if (tr.snapshots.empty()) return m;
  for (const Snapshot& s : tr.snapshots) {
    if (!m.first_below_1e2 && s.sync_error_inf < 1e-2) m.first_below_1e2 = s.t;
    if (!m.first_below_1e4 && s.sync_error_inf < 1e-4) m.first_below_1e4 = s.t;
    if (!m.first_below_1e6 && s.sync_error_inf < 1e-6) m.first_below_1e6 = s.t;
    for (const Vector& ui : s.u)
      if (ui.size() > 0) m.max_abs_u = std::max(m.max_abs_u, ui.cwiseAbs().maxCoeff());
  }
  m.final_sync_error_inf = tr.snapshots.back().sync_error_inf;
  return m;
}

}  // namespace satsync
