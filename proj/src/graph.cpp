#include "satsync/graph.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

namespace satsync {

Graph::Graph(int n_nodes, Matrix weights)
    : n_nodes_(n_nodes), weights_(std::move(weights)) {
  if (n_nodes_ < 1) throw std::invalid_argument("Graph: need at least one node");
  if (weights_.rows() != n_nodes_ || weights_.cols() != n_nodes_)
    throw std::invalid_argument("Graph: weight matrix must be n_nodes x n_nodes");
  for (Eigen::Index i = 0; i < weights_.rows(); ++i) {
    for (Eigen::Index j = 0; j < weights_.cols(); ++j) {
      const double w = weights_(i, j);
      if (!std::isfinite(w) || w < 0.0)
        throw std::invalid_argument("Graph: weights must be finite and nonnegative");
    }
    if (weights_(i, i) != 0.0)
      throw std::invalid_argument("Graph: self-weights must be zero");
  }
}

RootSet::RootSet(const std::vector<int>& members, int n_nodes) {
  if (members.empty())
    throw std::invalid_argument("RootSet: must contain at least one node");
  for (int m : members) {
    if (m < 0 || m >= n_nodes)
      throw std::invalid_argument("RootSet: node index " + std::to_string(m) +
                                  " out of range");
    members_.insert(m);
  }
}

DegreeBounds::DegreeBounds(const Graph& g, std::vector<double> values)
    : values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != g.n_nodes())
    throw std::invalid_argument("DegreeBounds: need one value per node");
  const std::vector<double> degrees = in_degrees(g);
  for (size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] < degrees[i])
      throw std::invalid_argument(
          "DegreeBounds: bound for node " + std::to_string(i + 1) +
          " is below its weighted in-degree");
  }
}

DegreeBounds DegreeBounds::tight(const Graph& g) {
  return DegreeBounds(in_degrees(g));
}

std::vector<double> in_degrees(const Graph& g) {
  std::vector<double> out(static_cast<size_t>(g.n_nodes()));
  for (Eigen::Index i = 0; i < g.n_nodes(); ++i)
    out[static_cast<size_t>(i)] = g.weights().row(i).sum();
  return out;
}

Matrix build_laplacian(const Graph& g) {
  const Matrix& a = g.weights();
  Matrix l = -a;
  for (Eigen::Index i = 0; i < a.rows(); ++i) l(i, i) = a.row(i).sum();
  return l;
}

Matrix expand_laplacian(const Matrix& laplacian, const RootSet& roots) {
  if (laplacian.rows() != laplacian.cols())
    throw std::invalid_argument("expand_laplacian: matrix must be square");
  Matrix out = laplacian;
  for (int m : roots.members()) {
    if (m >= laplacian.rows())
      throw std::invalid_argument("expand_laplacian: root index out of range");
    out(m, m) += 1.0;
  }
  return out;
}

Matrix build_dbar(const Matrix& expanded_laplacian, const DegreeBounds& bounds) {
  const Eigen::Index n = expanded_laplacian.rows();
  if (expanded_laplacian.cols() != n)
    throw std::invalid_argument("build_dbar: matrix must be square");
  if (static_cast<Eigen::Index>(bounds.values().size()) != n)
    throw std::invalid_argument("build_dbar: need one bound per node");
  Matrix out = Matrix::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    out.row(i) -= expanded_laplacian.row(i) / (2.0 + bounds[static_cast<int>(i)]);
  return out;
}

bool in_graph_set(const Graph& g, const RootSet& roots) {
  const int n = g.n_nodes();
  std::vector<char> seen(static_cast<size_t>(n), 0);
  std::deque<int> queue;
  for (int m : roots.members()) {
    seen[static_cast<size_t>(m)] = 1;
    queue.push_back(m);
  }
  int count = static_cast<int>(roots.members().size());
  while (!queue.empty()) {
    const int j = queue.front();
    queue.pop_front();
    // edge j -> i exists iff weights(i, j) > 0
    for (int i = 0; i < n; ++i) {
      if (!seen[static_cast<size_t>(i)] && g.weights()(i, j) > 0.0) {
        seen[static_cast<size_t>(i)] = 1;
        queue.push_back(i);
        ++count;
      }
    }
  }
  return count == n;
}

NetworkMatrices build_network_matrices(const Graph& g, const RootSet& roots,
                                       const DegreeBounds& bounds) {
  NetworkMatrices out;
  out.laplacian = build_laplacian(g);
  out.expanded_laplacian = expand_laplacian(out.laplacian, roots);
  out.dbar = build_dbar(out.expanded_laplacian, bounds);
  return out;
}

}  // namespace satsync
