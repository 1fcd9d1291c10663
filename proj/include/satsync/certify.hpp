#pragma once

#include <optional>
#include <string>
#include <vector>

#include "satsync/sim.hpp"

namespace satsync {

// Certificate that a configuration satisfies the sufficient conditions for
// global regulated synchronization. pass is true only when every check holds.
struct CertificationReport {
  int n = 1;
  int n_agents = 1;
  Mode mode = Mode::kPartialState;
  GainSet gains;

  bool graph_in_set = false;
  bool gains_in_region = false;
  double rho_dbar = 0.0;
  double rho_dbar_kron_a = 0.0;
  std::optional<double> rho_observer;  // partial-state mode only

  // P solves (Dbar ⊗ A)' P (Dbar ⊗ A) - P = -2 I
  Matrix p_d;
  double pd_residual = 0.0;
  double pd_min_eig = 0.0;

  double psi_norm = 0.0;  // ||Dbar ⊗ A - I||_2
  std::optional<double> h;
  std::optional<std::pair<double, double>> phi_eigs;

  bool pass = false;
  std::vector<std::string> reasons;
};

// The 2x2 matrix whose negative definiteness certifies decay of the mixed
// energy function at blend weight h:
//   [ -1 + k1/2 + psi^2 (1-h)(k1^2 + k2^2)/h    1 + k1 - k2 ]
//   [ 1 + k1 - k2                               -1 + k1/2   ]
Matrix phi_matrix(double k1, double k2, double h, double psi_norm);

// Smallest h on the grid {1 - 2^-j : j = 1..40} with both eigenvalues of
// phi_matrix strictly negative (below -1e-12). Empty if the grid runs out.
std::optional<double> find_h(double k1, double k2, double psi_norm);

CertificationReport certify(const SimConfig& cfg);

// Energy function samples along a trajectory. v1 is the input/velocity part,
// v2 the quadratic disagreement part e' P e with e = x - chi (stacked over
// agents, deviations from the reference).
struct LyapunovTrace {
  std::vector<int> t;
  std::vector<double> v1;
  std::vector<double> v2;
  std::vector<double> v;   // (1-h) v1 + h v2
  std::vector<double> dv;  // v[k+1] - v[k], one shorter
};

// Requires a trajectory recorded at every tick and a passing report.
LyapunovTrace lyapunov_trace(const Trajectory& tr, const CertificationReport& rep);

}  // namespace satsync
