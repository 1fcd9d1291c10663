#include "satsync/dynamics.hpp"

#include <stdexcept>

namespace satsync {

double saturate(double w) {
  if (w > 1.0) return 1.0;
  if (w < -1.0) return -1.0;
  return w;
}

Vector saturate(const Vector& w) {
  return w.unaryExpr([](double v) { return saturate(v); });
}

namespace {

Eigen::Index half_dim(const Vector& x, const char* who) {
  if (x.size() == 0 || x.size() % 2 != 0)
    throw std::invalid_argument(std::string(who) +
                                ": state must stack two equal-size blocks");
  return x.size() / 2;
}

}  // namespace

Vector agent_step(const Vector& x, const Vector& u) {
  const Eigen::Index n = half_dim(x, "agent_step");
  if (u.size() != n)
    throw std::invalid_argument("agent_step: input dimension must match half the state");
  Vector next(2 * n);
  next.head(n) = x.head(n) + x.tail(n);
  next.tail(n) = x.tail(n) + saturate(u);
  return next;
}

Vector exo_step(const Vector& x) {
  const Eigen::Index n = half_dim(x, "exo_step");
  Vector next(2 * n);
  next.head(n) = x.head(n) + x.tail(n);
  next.tail(n) = x.tail(n);
  return next;
}

Vector output(const Vector& x) {
  const Eigen::Index n = half_dim(x, "output");
  return x.head(n);
}

Matrix plant_a(int n) {
  if (n < 1) throw std::invalid_argument("plant_a: n must be positive");
  Matrix a = Matrix::Identity(2 * n, 2 * n);
  a.topRightCorner(n, n) = Matrix::Identity(n, n);
  return a;
}

Matrix plant_b(int n) {
  if (n < 1) throw std::invalid_argument("plant_b: n must be positive");
  Matrix b = Matrix::Zero(2 * n, n);
  b.bottomRows(n) = Matrix::Identity(n, n);
  return b;
}

}  // namespace satsync
