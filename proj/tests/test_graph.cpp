#include "doctest.h"

#include <random>

#include "satsync/graph.hpp"

using namespace satsync;

namespace {

// 3-node chain 1 -> 2 -> 3
Graph chain3() {
  Matrix w = Matrix::Zero(3, 3);
  w(1, 0) = 1.0;
  w(2, 1) = 1.0;
  return Graph(3, w);
}

// Random graph guaranteed reachable from the given root: every other node
// gets one incoming edge from an already-reached node, then extra edges are
// sprinkled on top.
Graph random_reachable(std::mt19937& gen, int n, int root, double wlow,
                       double whigh) {
  std::uniform_real_distribution<double> weight(wlow, whigh);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Matrix w = Matrix::Zero(n, n);
  std::vector<int> reached{root};
  std::vector<int> rest;
  for (int i = 0; i < n; ++i)
    if (i != root) rest.push_back(i);
  std::shuffle(rest.begin(), rest.end(), gen);
  for (int i : rest) {
    const int from = reached[gen() % reached.size()];
    w(i, from) = weight(gen);
    reached.push_back(i);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && w(i, j) == 0.0 && coin(gen) < 0.2) w(i, j) = weight(gen);
  return Graph(n, w);
}

}  // namespace

TEST_CASE("graph construction validates weights") {
  CHECK_THROWS_AS(Graph(0, Matrix::Zero(0, 0)), std::invalid_argument);
  CHECK_THROWS_AS(Graph(2, Matrix::Zero(3, 3)), std::invalid_argument);

  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 1) = -1.0;
  CHECK_THROWS_AS(Graph(2, neg), std::invalid_argument);

  Matrix self = Matrix::Zero(2, 2);
  self(0, 0) = 1.0;
  CHECK_THROWS_AS(Graph(2, self), std::invalid_argument);

  CHECK_NOTHROW(Graph(1, Matrix::Zero(1, 1)));
}

TEST_CASE("root set validates membership") {
  CHECK_THROWS_AS(RootSet({}, 3), std::invalid_argument);
  CHECK_THROWS_AS(RootSet({3}, 3), std::invalid_argument);
  CHECK_THROWS_AS(RootSet({-1}, 3), std::invalid_argument);
  RootSet s({0, 2}, 3);
  CHECK(s.contains(0));
  CHECK(!s.contains(1));
  CHECK(s.contains(2));
}

TEST_CASE("in-degrees of the stock networks") {
  Graph g = chain3();
  auto d = in_degrees(g);
  CHECK(d[0] == 0.0);
  CHECK(d[1] == 1.0);
  CHECK(d[2] == 1.0);

  Graph lonely(2, Matrix::Zero(2, 2));
  auto d2 = in_degrees(lonely);
  CHECK(d2[0] == 0.0);
  CHECK(d2[1] == 0.0);
}

TEST_CASE("laplacian of the 3-node chain") {
  Matrix l = build_laplacian(chain3());
  Matrix expect(3, 3);
  expect << 0, 0, 0, -1, 1, 0, 0, -1, 1;
  CHECK((l - expect).norm() == 0.0);
}

TEST_CASE("laplacian rows sum to zero") {
  std::mt19937 gen(3);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 9);
    Graph g = random_reachable(gen, n, 0, 0.1, 2.0);
    Matrix l = build_laplacian(g);
    CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("expanded laplacian only touches root diagonals") {
  Matrix l = build_laplacian(chain3());
  Matrix lbar = expand_laplacian(l, RootSet({0}, 3));
  Matrix expect(3, 3);
  expect << 1, 0, 0, -1, 1, 0, 0, -1, 1;
  CHECK((lbar - expect).norm() == 0.0);

  // every root bumps its own diagonal by exactly one
  Matrix zero = Matrix::Zero(2, 2);
  CHECK((expand_laplacian(zero, RootSet({0, 1}, 2)) - Matrix::Identity(2, 2))
            .norm() == 0.0);

  std::mt19937 gen(5);
  Graph g = random_reachable(gen, 6, 2, 0.5, 1.5);
  Matrix lg = build_laplacian(g);
  Matrix expected = lg;
  expected(1, 1) += 1.0;
  expected(4, 4) += 1.0;
  CHECK((expand_laplacian(lg, RootSet({1, 4}, 6)) - expected).norm() == 0.0);
}

TEST_CASE("dbar for the 3-node chain rooted at node 1") {
  Graph g = chain3();
  RootSet s({0}, 3);
  DegreeBounds b = DegreeBounds::tight(g);
  Matrix dbar = build_dbar(expand_laplacian(build_laplacian(g), s), b);

  Matrix expect(3, 3);
  expect << 0.5, 0, 0, 1.0 / 3.0, 2.0 / 3.0, 0, 0, 1.0 / 3.0, 2.0 / 3.0;
  CHECK((dbar - expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(spectral_radius(dbar) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("dbar with slack degree bounds stays stable") {
  Graph g = chain3();
  RootSet s({0}, 3);
  DegreeBounds loose(g, {5.0, 5.0, 5.0});
  Matrix dbar = build_dbar(expand_laplacian(build_laplacian(g), s), loose);
  CHECK(dbar(0, 0) == doctest::Approx(1.0 - 1.0 / 7.0).epsilon(1e-15));
  CHECK(spectral_radius(dbar) < 1.0);
}

TEST_CASE("degree bounds reject underestimates") {
  Graph g = chain3();
  CHECK_THROWS_AS(DegreeBounds(g, {0.0, 0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(DegreeBounds(g, {0.0, 1.0}), std::invalid_argument);
  CHECK_NOTHROW(DegreeBounds(g, {0.0, 1.0, 1.0}));
}

TEST_CASE("reachability from the root set") {
  Graph g = chain3();
  CHECK(in_graph_set(g, RootSet({0}, 3)));
  CHECK(!in_graph_set(g, RootSet({1}, 3)));
  CHECK(!in_graph_set(g, RootSet({2}, 3)));
  CHECK(in_graph_set(g, RootSet({1, 0}, 3)));

  Graph lonely(2, Matrix::Zero(2, 2));
  CHECK(!in_graph_set(lonely, RootSet({0}, 2)));
  CHECK(in_graph_set(lonely, RootSet({0, 1}, 2)));
}

TEST_CASE("unreachable networks pin the spectral radius at one") {
  Graph g = chain3();
  RootSet s({2}, 3);  // nodes 1 and 2 cannot see the root
  Matrix dbar =
      build_dbar(expand_laplacian(build_laplacian(g), s), DegreeBounds::tight(g));
  CHECK(spectral_radius(dbar) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reachable random networks always give a stable dbar") {
  std::mt19937 gen(2024);
  int checked = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 11);
    const int root = static_cast<int>(gen() % n);
    const bool wide = trial % 2 == 0;
    Graph g = random_reachable(gen, n, root, wide ? 0.1 : 0.5, wide ? 2.0 : 1.5);
    RootSet s({root}, n);
    REQUIRE(in_graph_set(g, s));

    NetworkMatrices nm = build_network_matrices(g, s, DegreeBounds::tight(g));
    CHECK(spectral_radius(nm.dbar) < 1.0);
    ++checked;
  }
  CHECK(checked >= 100);
}
