#include "satsync/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace satsync {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double spectral_radius(const Matrix& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("spectral_radius: matrix must be square");
  if (m.rows() == 0) return 0.0;

  Eigen::RealSchur<Matrix> schur;
  schur.setMaxIterations(10000);
  schur.compute(m, /*computeU=*/false);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("spectral_radius: Schur iteration did not converge");

  // Walk the quasi-triangular factor: 1x1 diagonal blocks are real
  // eigenvalues, 2x2 blocks hold complex pairs with |lambda|^2 = det.
  const Matrix& t = schur.matrixT();
  const Eigen::Index n = t.rows();
  double rho = 0.0;
  Eigen::Index i = 0;
  while (i < n) {
    if (i + 1 < n && t(i + 1, i) != 0.0) {
      const double det =
          t(i, i) * t(i + 1, i + 1) - t(i, i + 1) * t(i + 1, i);
      rho = std::max(rho, std::sqrt(std::abs(det)));
      i += 2;
    } else {
      rho = std::max(rho, std::abs(t(i, i)));
      i += 1;
    }
  }
  return rho;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const Matrix g = m.transpose() * m;  // symmetric PSD, top eigenvalue = norm^2
  const Eigen::Index n = g.rows();

  double best = 0.0;
  // Two starts with different sign patterns so a start vector orthogonal to
  // the top eigenspace cannot fool the iteration.
  for (int attempt = 0; attempt < 2; ++attempt) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ramp = static_cast<double>(i + 1) / static_cast<double>(n + 1);
      v[i] = attempt == 0 ? 1.0 + ramp : ((i % 2 == 0) ? 1.0 : -1.0) + 0.5 * ramp;
    }
    v.normalize();

    double est = 0.0;
    for (int it = 0; it < 200000; ++it) {
      Vector w = g * v;
      const double nw = w.norm();
      if (nw == 0.0) {
        est = 0.0;
        break;
      }
      v = w / nw;
      if (std::abs(nw - est) <= tol::kSpectralNormRel * std::max(1.0, nw)) {
        est = nw;
        break;
      }
      est = nw;
    }
    best = std::max(best, std::sqrt(est));
  }
  return best;
}

namespace {

void require_lyapunov_inputs(const Matrix& m, const Matrix& q) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("solve_discrete_lyapunov: m must be square");
  if (q.rows() != q.cols() || q.rows() != m.rows())
    throw std::invalid_argument("solve_discrete_lyapunov: q must match m");
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > tol::kSymmetryRel * scale)
    throw std::invalid_argument("solve_discrete_lyapunov: q must be symmetric");
}

}  // namespace

Matrix solve_discrete_lyapunov(const Matrix& m, const Matrix& q) {
  require_lyapunov_inputs(m, q);
  const double rho = spectral_radius(m);
  if (rho >= 1.0)
    throw std::runtime_error(
        "solve_discrete_lyapunov: spectral radius is " + std::to_string(rho) +
        ", need rho < 1");

  const Eigen::Index d = m.rows();
  Matrix p;
  if (d <= 64) {
    // vec(m' P m) = (m ⊗ m)' vec(P) for column-major vec, so the fixed point
    // solves (I - kron(m', m')) vec(P) = vec(q).
    const Matrix mt = m.transpose();
    Matrix sys = Matrix::Identity(d * d, d * d) - kron(mt, mt);
    Vector vq = Eigen::Map<const Vector>(q.data(), d * d);
    Vector vp = sys.partialPivLu().solve(vq);
    p = Eigen::Map<const Matrix>(vp.data(), d, d);
  } else {
    // Squared-term accumulation: P_{k+1} = P_k + M_k' P_k M_k, M_{k+1} = M_k^2
    // doubles the number of series terms per pass.
    p = q;
    Matrix mk = m;
    for (int it = 0; it < 128; ++it) {
      const Matrix term = mk.transpose() * p * mk;
      p += term;
      if (term.norm() < tol::kLyapunovSeriesTerm) break;
      mk = mk * mk;
    }
  }

  const Matrix sym = 0.5 * (p + p.transpose());
  p = sym;
  const double residual = (m.transpose() * p * m - p + q).norm();
  if (!(residual < tol::kLyapunovResidual))
    throw std::runtime_error(
        "solve_discrete_lyapunov: residual " + std::to_string(residual) +
        " exceeds tolerance");
  return p;
}

}  // namespace satsync
