#pragma once

#include <Eigen/Dense>

namespace satsync {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Numerical tolerances used across the library. Anything that compares a
// computed quantity against a threshold goes through one of these so the
// margins live in one place.
namespace tol {
inline constexpr double kSpectralRadiusMargin = 1e-10;  // strictness margin for rho < 1 checks
inline constexpr double kSpectralNormRel = 1e-13;       // power iteration convergence (relative)
inline constexpr double kLyapunovResidual = 1e-8;       // ||M'PM - P + Q||_F acceptance
inline constexpr double kLyapunovSeriesTerm = 1e-14;    // series-term cutoff for the doubling solver
inline constexpr double kPhiNegativity = 1e-12;         // eigenvalues of Phi must be below -this
inline constexpr double kSymmetryRel = 1e-12;           // symmetry check on Lyapunov right-hand sides
}  // namespace tol

// Kronecker product, dense.
Matrix kron(const Matrix& a, const Matrix& b);

// Largest eigenvalue magnitude of a square matrix, via the real Schur form.
double spectral_radius(const Matrix& m);

// Largest singular value, via power iteration on m' * m.
double spectral_norm(const Matrix& m);

// Solve P = m' P m + q for symmetric q with rho(m) < 1. Direct vectorized
// solve for small dimensions, squared-term series accumulation above that.
// Throws if rho(m) >= 1 or the residual check fails.
Matrix solve_discrete_lyapunov(const Matrix& m, const Matrix& q);

}  // namespace satsync
