#pragma once

#include <set>
#include <vector>

#include "satsync/linalg.hpp"

namespace satsync {

// Weighted directed communication graph. weights(i, j) is the gain agent i
// applies to information arriving from agent j; a positive entry means the
// edge j -> i exists. Self-weights must be zero.
class Graph {
 public:
  Graph(int n_nodes, Matrix weights);

  int n_nodes() const { return n_nodes_; }
  const Matrix& weights() const { return weights_; }

 private:
  int n_nodes_;
  Matrix weights_;
};

// The agents that additionally observe the reference trajectory.
class RootSet {
 public:
  explicit RootSet(const std::vector<int>& members, int n_nodes);

  bool contains(int i) const { return members_.count(i) != 0; }
  const std::set<int>& members() const { return members_; }

 private:
  std::set<int> members_;
};

// Per-node upper bounds on weighted in-degree. The synchronization design
// only needs bounds, not exact degrees, which keeps it independent of the
// precise topology; tight() uses the exact degrees.
class DegreeBounds {
 public:
  DegreeBounds(const Graph& g, std::vector<double> values);
  static DegreeBounds tight(const Graph& g);

  const std::vector<double>& values() const { return values_; }
  double operator[](int i) const { return values_[static_cast<size_t>(i)]; }

 private:
  explicit DegreeBounds(std::vector<double> values) : values_(std::move(values)) {}
  std::vector<double> values_;
};

// Weighted in-degree of every node (row sums of the weight matrix).
std::vector<double> in_degrees(const Graph& g);

// L(i,i) = sum_k a_ik, L(i,j) = -a_ij.
Matrix build_laplacian(const Graph& g);

// Adds 1 to the diagonal entry of every root node.
Matrix expand_laplacian(const Matrix& laplacian, const RootSet& roots);

// Dbar = I - diag(1 / (2 + bound_i)) * Lbar. Schur stable whenever every
// node can be reached from the root set.
Matrix build_dbar(const Matrix& expanded_laplacian, const DegreeBounds& bounds);

// True iff every node is reachable from the root set along directed edges.
bool in_graph_set(const Graph& g, const RootSet& roots);

struct NetworkMatrices {
  Matrix laplacian;
  Matrix expanded_laplacian;
  Matrix dbar;
};

NetworkMatrices build_network_matrices(const Graph& g, const RootSet& roots,
                                       const DegreeBounds& bounds);

}  // namespace satsync
