#pragma once

#include <vector>

#include "satsync/graph.hpp"
#include "satsync/linalg.hpp"

namespace satsync {

struct GainSet {
  double k1 = 0.0;
  double k2 = 0.0;
  double f1 = 1.5;  // observer gain on the position error
  double f2 = 0.5;  // observer gain feeding the velocity estimate
};

// Agent-count-free admissible region for (k1, k2):
//   0 < k1 < 2,  k2 > 0,  (4 + k1 - 2 k2)(3 k1 - 2 k2) < 0
bool gain_region_contains(double k1, double k2);

enum class ZetaBarForm {
  kNormalized,  // scale (2 + bound_i) applied to the whole sum, reference term included
  kLiteral,     // scale applied to the neighbor sum only
};

// Weighted disagreement of node i's measurement with its neighbors, plus the
// reference mismatch for root nodes:
//   normalized: ( sum_j a_ij (y_i - y_j) + iota_i (y_i - y_ref) ) / (2 + bound_i)
//   literal:      sum_j a_ij (y_i - y_j) / (2 + bound_i) + iota_i (y_i - y_ref)
// The normalized form makes the stacked error evolve as Dbar ⊗ A, which is
// what the certification checks assume; the literal form is kept selectable.
Vector compute_zeta_bar(int i, const std::vector<Vector>& outputs,
                        const Vector& y_ref, const Graph& g, const RootSet& roots,
                        const DegreeBounds& bounds,
                        ZetaBarForm form = ZetaBarForm::kNormalized);

// Same weighted disagreement over an arbitrary broadcast signal, never
// involving the reference:  sum_j a_ij (xi_i - xi_j) / (2 + bound_i)
Vector compute_zeta_hat(int i, const std::vector<Vector>& broadcasts,
                        const Graph& g, const DegreeBounds& bounds);

// Controller for agents that measure their full state. Holds a 2n-dimensional
// internal state chi; u = -(k1 chi_I + k2 chi_II). Construction needs only
// the agent's own bound and root membership, never the agent count.
class FullStateController {
 public:
  FullStateController(int n, bool in_root_set, double degree_bound,
                      const GainSet& gains);

  Vector control() const;
  // sat_u is the saturated input actually applied this tick; zeta_bar and
  // zeta_hat are the neighborhood signals over measurements and over chi.
  void step(const Vector& sat_u, const Vector& zeta_bar, const Vector& zeta_hat);

  const Vector& chi() const { return chi_; }
  void set_chi(const Vector& chi);
  int n() const { return n_; }

 private:
  int n_;
  double coupling_;  // iota / (2 + bound)
  GainSet gains_;
  Vector chi_;
};

// Controller for agents that measure position only. Adds a 2n-dimensional
// observer state xhat driven by zeta_bar; chi then tracks xhat instead of the
// raw measurement.
class PartialStateController {
 public:
  PartialStateController(int n, bool in_root_set, double degree_bound,
                         const GainSet& gains);

  Vector control() const;
  // zeta_hat_chi is the disagreement over broadcast chi (2n), zeta_hat_sat
  // over broadcast saturated inputs (n).
  void step(const Vector& sat_u, const Vector& zeta_bar,
            const Vector& zeta_hat_chi, const Vector& zeta_hat_sat);

  const Vector& chi() const { return chi_; }
  const Vector& xhat() const { return xhat_; }
  void set_chi(const Vector& chi);
  void set_xhat(const Vector& xhat);
  int n() const { return n_; }

 private:
  int n_;
  double coupling_;
  GainSet gains_;
  Vector chi_;
  Vector xhat_;
};

// Observer error matrix A - F C for the partial-state design; Schur stability
// of this matrix is a certification requirement.
Matrix observer_error_matrix(int n, double f1, double f2);

}  // namespace satsync
