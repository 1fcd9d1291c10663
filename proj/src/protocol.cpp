#include "satsync/protocol.hpp"

#include <stdexcept>
#include <string>

namespace satsync {

bool gain_region_contains(double k1, double k2) {
  if (!(k1 > 0.0 && k1 < 2.0)) return false;
  if (!(k2 > 0.0)) return false;
  return (4.0 + k1 - 2.0 * k2) * (3.0 * k1 - 2.0 * k2) < 0.0;
}

namespace {

void check_node(int i, int n_nodes, const char* who) {
  if (i < 0 || i >= n_nodes)
    throw std::invalid_argument(std::string(who) + ": node index out of range");
}

Vector weighted_disagreement(int i, const std::vector<Vector>& signals,
                             const Graph& g, const char* who) {
  if (static_cast<int>(signals.size()) != g.n_nodes())
    throw std::invalid_argument(std::string(who) + ": need one signal per node");
  const Vector& own = signals[static_cast<size_t>(i)];
  Vector acc = Vector::Zero(own.size());
  for (int j = 0; j < g.n_nodes(); ++j) {
    const double w = g.weights()(i, j);
    if (w == 0.0) continue;
    const Vector& other = signals[static_cast<size_t>(j)];
    if (other.size() != own.size())
      throw std::invalid_argument(std::string(who) + ": signal sizes differ");
    acc += w * (own - other);
  }
  return acc;
}

}  // namespace

Vector compute_zeta_bar(int i, const std::vector<Vector>& outputs,
                        const Vector& y_ref, const Graph& g, const RootSet& roots,
                        const DegreeBounds& bounds, ZetaBarForm form) {
  check_node(i, g.n_nodes(), "compute_zeta_bar");
  const Vector& own = outputs[static_cast<size_t>(i)];
  if (y_ref.size() != own.size())
    throw std::invalid_argument("compute_zeta_bar: reference size differs");
  Vector acc = weighted_disagreement(i, outputs, g, "compute_zeta_bar");
  const double scale = 2.0 + bounds[i];
  if (!roots.contains(i)) return acc / scale;
  if (form == ZetaBarForm::kNormalized) return (acc + (own - y_ref)) / scale;
  return acc / scale + (own - y_ref);
}

Vector compute_zeta_hat(int i, const std::vector<Vector>& broadcasts,
                        const Graph& g, const DegreeBounds& bounds) {
  check_node(i, g.n_nodes(), "compute_zeta_hat");
  Vector acc = weighted_disagreement(i, broadcasts, g, "compute_zeta_hat");
  return acc / (2.0 + bounds[i]);
}

namespace {

double coupling_for(bool in_root_set, double degree_bound) {
  if (degree_bound < 0.0)
    throw std::invalid_argument("controller: degree bound must be nonnegative");
  return in_root_set ? 1.0 / (2.0 + degree_bound) : 0.0;
}

Vector control_law(const Vector& chi, int n, const GainSet& g) {
  return -(g.k1 * chi.head(n) + g.k2 * chi.tail(n));
}

void check_vec(const Vector& v, Eigen::Index want, const char* who) {
  if (v.size() != want)
    throw std::invalid_argument(std::string(who) + ": unexpected vector size");
}

}  // namespace

FullStateController::FullStateController(int n, bool in_root_set,
                                         double degree_bound, const GainSet& gains)
    : n_(n),
      coupling_(coupling_for(in_root_set, degree_bound)),
      gains_(gains),
      chi_(Vector::Zero(2 * n)) {
  if (n < 1) throw std::invalid_argument("FullStateController: n must be positive");
}

Vector FullStateController::control() const { return control_law(chi_, n_, gains_); }

void FullStateController::step(const Vector& sat_u, const Vector& zeta_bar,
                               const Vector& zeta_hat) {
  check_vec(sat_u, n_, "FullStateController::step sat_u");
  check_vec(zeta_bar, 2 * n_, "FullStateController::step zeta_bar");
  check_vec(zeta_hat, 2 * n_, "FullStateController::step zeta_hat");
  const Vector m = (1.0 - coupling_) * chi_ + zeta_bar - zeta_hat;
  chi_.head(n_) = m.head(n_) + m.tail(n_);
  chi_.tail(n_) = m.tail(n_) + sat_u;
}

void FullStateController::set_chi(const Vector& chi) {
  check_vec(chi, 2 * n_, "FullStateController::set_chi");
  chi_ = chi;
}

PartialStateController::PartialStateController(int n, bool in_root_set,
                                               double degree_bound,
                                               const GainSet& gains)
    : n_(n),
      coupling_(coupling_for(in_root_set, degree_bound)),
      gains_(gains),
      chi_(Vector::Zero(2 * n)),
      xhat_(Vector::Zero(2 * n)) {
  if (n < 1) throw std::invalid_argument("PartialStateController: n must be positive");
}

Vector PartialStateController::control() const { return control_law(chi_, n_, gains_); }

void PartialStateController::step(const Vector& sat_u, const Vector& zeta_bar,
                                  const Vector& zeta_hat_chi,
                                  const Vector& zeta_hat_sat) {
  check_vec(sat_u, n_, "PartialStateController::step sat_u");
  check_vec(zeta_bar, n_, "PartialStateController::step zeta_bar");
  check_vec(zeta_hat_chi, 2 * n_, "PartialStateController::step zeta_hat_chi");
  check_vec(zeta_hat_sat, n_, "PartialStateController::step zeta_hat_sat");

  const double f1 = gains_.f1;
  const double f2 = gains_.f2;
  Vector xhat_next(2 * n_);
  xhat_next.head(n_) =
      (1.0 - f1) * xhat_.head(n_) + xhat_.tail(n_) + f1 * zeta_bar;
  xhat_next.tail(n_) = -f2 * xhat_.head(n_) + xhat_.tail(n_) + zeta_hat_sat +
                       f2 * zeta_bar + coupling_ * sat_u;

  const Vector m = (1.0 - coupling_) * chi_ + xhat_ - zeta_hat_chi;
  chi_.head(n_) = m.head(n_) + m.tail(n_);
  chi_.tail(n_) = m.tail(n_) + sat_u;
  xhat_ = xhat_next;
}

void PartialStateController::set_chi(const Vector& chi) {
  check_vec(chi, 2 * n_, "PartialStateController::set_chi");
  chi_ = chi;
}

void PartialStateController::set_xhat(const Vector& xhat) {
  check_vec(xhat, 2 * n_, "PartialStateController::set_xhat");
  xhat_ = xhat;
}

Matrix observer_error_matrix(int n, double f1, double f2) {
  if (n < 1) throw std::invalid_argument("observer_error_matrix: n must be positive");
  Matrix out(2 * n, 2 * n);
  const Matrix id = Matrix::Identity(n, n);
  out.topLeftCorner(n, n) = (1.0 - f1) * id;
  out.topRightCorner(n, n) = id;
  out.bottomLeftCorner(n, n) = -f2 * id;
  out.bottomRightCorner(n, n) = id;
  return out;
}

}  // namespace satsync
