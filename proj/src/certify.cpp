#include "satsync/certify.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "satsync/dynamics.hpp"

namespace satsync {

Matrix phi_matrix(double k1, double k2, double h, double psi_norm) {
  if (!(h > 0.0 && h < 1.0))
    throw std::invalid_argument("phi_matrix: h must lie strictly inside (0, 1)");
  Matrix phi(2, 2);
  phi(0, 0) = -1.0 + 0.5 * k1 +
              psi_norm * psi_norm * (1.0 - h) * (k1 * k1 + k2 * k2) / h;
  phi(0, 1) = 1.0 + k1 - k2;
  phi(1, 0) = phi(0, 1);
  phi(1, 1) = -1.0 + 0.5 * k1;
  return phi;
}

namespace {

std::pair<double, double> sym2x2_eigs(const Matrix& m) {
  const double a = m(0, 0), b = m(0, 1), c = m(1, 1);
  const double mid = 0.5 * (a + c);
  const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  return {mid - rad, mid + rad};
}

}  // namespace

std::optional<double> find_h(double k1, double k2, double psi_norm) {
  for (int j = 1; j <= 40; ++j) {
    const double h = 1.0 - std::ldexp(1.0, -j);
    const auto [lo, hi] = sym2x2_eigs(phi_matrix(k1, k2, h, psi_norm));
    if (hi < -tol::kPhiNegativity) return h;
    (void)lo;
  }
  return std::nullopt;
}

CertificationReport certify(const SimConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("certify: n must be positive");
  const RootSet roots(cfg.roots, cfg.graph.n_nodes());
  const DegreeBounds bounds = cfg.bounds
                                  ? DegreeBounds(cfg.graph, *cfg.bounds)
                                  : DegreeBounds::tight(cfg.graph);

  CertificationReport rep;
  rep.n = cfg.n;
  rep.n_agents = cfg.graph.n_nodes();
  rep.mode = cfg.mode;
  rep.gains = cfg.gains;

  rep.graph_in_set = in_graph_set(cfg.graph, roots);
  if (!rep.graph_in_set)
    rep.reasons.push_back("graph set: not every node is reachable from the root set");

  rep.gains_in_region = gain_region_contains(cfg.gains.k1, cfg.gains.k2);
  if (!rep.gains_in_region)
    rep.reasons.push_back("gain region: (k1, k2) outside the admissible region");

  const NetworkMatrices nm = build_network_matrices(cfg.graph, roots, bounds);
  rep.rho_dbar = spectral_radius(nm.dbar);
  if (!(rep.rho_dbar < 1.0))
    rep.reasons.push_back("rho(Dbar) is not below 1");

  const Matrix big = kron(nm.dbar, plant_a(cfg.n));
  rep.rho_dbar_kron_a = spectral_radius(big);
  if (!(rep.rho_dbar_kron_a < 1.0))
    rep.reasons.push_back("rho(Dbar kron A) is not below 1");

  if (cfg.mode == Mode::kPartialState) {
    rep.rho_observer =
        spectral_radius(observer_error_matrix(cfg.n, cfg.gains.f1, cfg.gains.f2));
    if (!(*rep.rho_observer < 1.0))
      rep.reasons.push_back("observer matrix is not Schur stable");
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  bool pd_ok = false;
  try {
    const Eigen::Index d = big.rows();
    const Matrix q = 2.0 * Matrix::Identity(d, d);
    rep.p_d = solve_discrete_lyapunov(big, q);
    rep.pd_residual = (big.transpose() * rep.p_d * big - rep.p_d + q).norm();
    Eigen::SelfAdjointEigenSolver<Matrix> es(rep.p_d);
    rep.pd_min_eig = es.eigenvalues().minCoeff();
    pd_ok = rep.pd_residual < tol::kLyapunovResidual && rep.pd_min_eig > 0.0;
    if (!pd_ok) rep.reasons.push_back("disagreement energy matrix is not usable");
  } catch (const std::exception& e) {
    rep.pd_residual = nan;
    rep.pd_min_eig = nan;
    rep.reasons.push_back(std::string("Lyapunov solve failed: ") + e.what());
  }

  rep.psi_norm = spectral_norm(big - Matrix::Identity(big.rows(), big.cols()));

  if (rep.gains_in_region) {
    rep.h = find_h(cfg.gains.k1, cfg.gains.k2, rep.psi_norm);
    if (rep.h) {
      rep.phi_eigs = sym2x2_eigs(
          phi_matrix(cfg.gains.k1, cfg.gains.k2, *rep.h, rep.psi_norm));
    } else {
      rep.reasons.push_back("no blend weight h on the search grid works");
    }
  }

  rep.pass = rep.graph_in_set && rep.gains_in_region && rep.rho_dbar < 1.0 &&
             rep.rho_dbar_kron_a < 1.0 &&
             (cfg.mode != Mode::kPartialState || *rep.rho_observer < 1.0) &&
             pd_ok && rep.h.has_value();
  return rep;
}

LyapunovTrace lyapunov_trace(const Trajectory& tr, const CertificationReport& rep) {
  if (!rep.pass)
    throw std::invalid_argument("lyapunov_trace: certification did not pass");
  if (tr.snapshots.empty())
    throw std::invalid_argument("lyapunov_trace: empty trajectory");
  for (size_t k = 0; k < tr.snapshots.size(); ++k)
    if (tr.snapshots[k].t != static_cast<int>(k))
      throw std::invalid_argument(
          "lyapunov_trace: trajectory must be recorded at every tick");

  const int n = tr.n;
  const int n_agents = tr.n_agents;
  const double k1 = rep.gains.k1;
  const double h = rep.h.value();

  LyapunovTrace out;
  for (const Snapshot& snap : tr.snapshots) {
    Vector s(n_agents * n), u(n_agents * n), vel_err(n_agents * n);
    Vector e(2 * n_agents * n);
    for (int i = 0; i < n_agents; ++i) {
      const size_t k = static_cast<size_t>(i);
      s.segment(i * n, n) = snap.sat_u[k];
      u.segment(i * n, n) = snap.u[k];
      const Vector xt = snap.x[k] - snap.xr;
      vel_err.segment(i * n, n) = xt.tail(n);
      e.segment(2 * i * n, 2 * n) = xt - snap.chi[k];
    }
    const double v1 = (1.0 + 0.5 * k1) * s.squaredNorm() +
                      2.0 * k1 * s.dot(vel_err) + k1 * vel_err.squaredNorm() +
                      2.0 * s.dot(u - s);
    const double v2 = e.dot(rep.p_d * e);
    out.t.push_back(snap.t);
    out.v1.push_back(v1);
    out.v2.push_back(v2);
    out.v.push_back((1.0 - h) * v1 + h * v2);
  }
  for (size_t k = 0; k + 1 < out.v.size(); ++k)
    out.dv.push_back(out.v[k + 1] - out.v[k]);
  return out;
}

}  // namespace satsync
