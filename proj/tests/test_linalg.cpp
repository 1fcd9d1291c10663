#include "doctest.h"

#include <Eigen/SVD>

#include <random>

#include "satsync/linalg.hpp"

using namespace satsync;

namespace {

Matrix random_matrix(std::mt19937& gen, int rows, int cols, double scale) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = dist(gen);
  return m;
}

// Reference solver used as an independent oracle: plain term-by-term series
// sum_k (m^T)^k q m^k without the squaring trick the library uses.
Matrix series_lyapunov(const Matrix& m, const Matrix& q, int max_terms) {
  Matrix p = q;
  Matrix left = m.transpose();
  Matrix right = m;
  Matrix term = q;
  for (int k = 0; k < max_terms; ++k) {
    term = left * term * right;
    p += term;
    if (term.norm() < 1e-16) break;
  }
  return p;
}

}  // namespace

TEST_CASE("kron basic shapes and values") {
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  Matrix b = Matrix::Identity(2, 2);

  Matrix ab = kron(a, b);
  REQUIRE(ab.rows() == 4);
  CHECK(ab(0, 0) == 1.0);
  CHECK(ab(0, 2) == 2.0);
  CHECK(ab(1, 3) == 2.0);
  CHECK(ab(2, 0) == 3.0);
  CHECK(ab(0, 1) == 0.0);

  // scalar on the left is plain scaling
  Matrix s(1, 1);
  s << 2.0;
  CHECK((kron(s, a) - 2.0 * a).norm() == 0.0);

  // identity on the left stacks copies on the diagonal
  Matrix ia = kron(b, a);
  CHECK(ia.block(0, 0, 2, 2) == a);
  CHECK(ia.block(2, 2, 2, 2) == a);
  CHECK(ia.block(0, 2, 2, 2).norm() == 0.0);
}

TEST_CASE("kron mixed product property") {
  std::mt19937 gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = random_matrix(gen, 3, 2, 1.0);
    Matrix b = random_matrix(gen, 2, 4, 1.0);
    Matrix c = random_matrix(gen, 2, 3, 1.0);
    Matrix d = random_matrix(gen, 4, 2, 1.0);
    Matrix lhs = kron(a, b) * kron(c, d);
    Matrix rhs = kron(Matrix(a * c), Matrix(b * d));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("spectral radius on known matrices") {
  Matrix upper(2, 2);
  upper << 1, 1, 0, 1;
  CHECK(spectral_radius(upper) == doctest::Approx(1.0).epsilon(1e-12));

  Matrix diag = Matrix::Zero(3, 3);
  diag(0, 0) = -0.3;
  diag(1, 1) = 0.2;
  diag(2, 2) = -0.9;
  CHECK(spectral_radius(diag) == doctest::Approx(0.9).epsilon(1e-12));

  // rotation by 90 degrees scaled by 2: complex pair of magnitude 2
  Matrix rot(2, 2);
  rot << 0, -2, 2, 0;
  CHECK(spectral_radius(rot) == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(spectral_radius(Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("spectral radius multiplies over kron") {
  std::mt19937 gen(11);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a = random_matrix(gen, 4, 4, 1.0);
    Matrix b = random_matrix(gen, 3, 3, 1.0);
    const double expect = spectral_radius(a) * spectral_radius(b);
    CHECK(spectral_radius(kron(a, b)) ==
          doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("spectral norm on known matrices") {
  CHECK(spectral_norm(Matrix::Identity(4, 4)) == doctest::Approx(1.0).epsilon(1e-12));

  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 3.0;
  diag(1, 1) = -4.0;
  CHECK(spectral_norm(diag) == doctest::Approx(4.0).epsilon(1e-12));

  // norm of a rank-one outer product is the product of the factor norms
  Vector u(3), v(2);
  u << 1, 2, 2;
  v << 3, 4;
  Matrix outer = u * v.transpose();
  CHECK(spectral_norm(outer) == doctest::Approx(15.0).epsilon(1e-10));
}

TEST_CASE("spectral norm agrees with singular value decomposition") {
  std::mt19937 gen(23);
  for (int trial = 0; trial < 40; ++trial) {
    const int rows = 1 + static_cast<int>(gen() % 12);
    const int cols = 1 + static_cast<int>(gen() % 12);
    Matrix m = random_matrix(gen, rows, cols, 2.0);
    Eigen::JacobiSVD<Matrix> svd(m);
    const double expect = svd.singularValues()(0);
    CHECK(spectral_norm(m) == doctest::Approx(expect).epsilon(1e-8));
  }
}

TEST_CASE("discrete lyapunov solve, scalar and trivial cases") {
  Matrix zero = Matrix::Zero(2, 2);
  Matrix q = Matrix::Identity(2, 2);
  CHECK((solve_discrete_lyapunov(zero, q) - q).norm() < 1e-14);

  // scalar: p = m^2 p + q  =>  p = q / (1 - m^2); m = 0.5, q = 1 gives 4/3
  Matrix m(1, 1), q1(1, 1);
  m << 0.5;
  q1 << 1.0;
  CHECK(solve_discrete_lyapunov(m, q1)(0, 0) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("discrete lyapunov solve rejects bad inputs") {
  Matrix q = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(solve_discrete_lyapunov(Matrix::Identity(2, 2), q),
                  std::runtime_error);  // rho = 1

  Matrix asym(2, 2);
  asym << 1, 2, 3, 4;
  Matrix stable = 0.5 * Matrix::Identity(2, 2);
  CHECK_THROWS_AS(solve_discrete_lyapunov(stable, asym), std::invalid_argument);

  CHECK_THROWS_AS(solve_discrete_lyapunov(Matrix::Zero(2, 3), q),
                  std::invalid_argument);
}

TEST_CASE("discrete lyapunov solve matches series oracle and is usable") {
  std::mt19937 gen(31);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + static_cast<int>(gen() % 7);
    Matrix m = random_matrix(gen, d, d, 1.0);
    m *= 0.8 / std::max(spectral_radius(m), 1e-6);
    Matrix q = Matrix::Identity(d, d);

    Matrix p = solve_discrete_lyapunov(m, q);
    Matrix oracle = series_lyapunov(m, q, 4000);
    CHECK((p - oracle).cwiseAbs().maxCoeff() < 1e-8);

    CHECK((p - p.transpose()).norm() == 0.0);
    CHECK((m.transpose() * p * m - p + q).norm() < 1e-8);
    Eigen::SelfAdjointEigenSolver<Matrix> es(p);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("discrete lyapunov solve handles large dimensions") {
  // above the direct-solve cutoff, exercising the series accumulation path
  std::mt19937 gen(47);
  Matrix m = random_matrix(gen, 70, 70, 1.0);
  m *= 0.9 / spectral_radius(m);
  Matrix q = Matrix::Identity(70, 70);

  Matrix p = solve_discrete_lyapunov(m, q);
  CHECK((m.transpose() * p * m - p + q).norm() < 1e-8);
  Matrix oracle = series_lyapunov(m, q, 1000);
  CHECK((p - oracle).cwiseAbs().maxCoeff() / oracle.cwiseAbs().maxCoeff() < 1e-10);
}
