#pragma once

#include <Eigen/Dense>

namespace gamtl {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// d x T stack of per-task parameter vectors; column t is task t's model.
using WeightMatrix = Eigen::MatrixXd;

// Symmetric T x T edge-weight matrix with zero diagonal and nonnegative
// off-diagonal entries. Construction validates all invariants.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(Matrix weights);

  // The empty graph on `size` nodes.
  static AdjacencyMatrix zeros(Index size);

  Index size() const { return weights_.rows(); }
  const Matrix& weights() const { return weights_; }
  double operator()(Index i, Index j) const { return weights_(i, j); }

  // A * 1.
  Vector degrees() const;
  bool has_positive_degrees() const;

  // Number of edges with weight strictly above `threshold`.
  Index edge_count(double threshold = 0.0) const;

 private:
  Matrix weights_;
};

// Z[i][j] = squared Euclidean distance between task parameter columns.
class PairwiseDistanceMatrix {
 public:
  PairwiseDistanceMatrix() = default;
  explicit PairwiseDistanceMatrix(Matrix entries);

  Index size() const { return entries_.rows(); }
  const Matrix& entries() const { return entries_; }
  double operator()(Index i, Index j) const { return entries_(i, j); }

  // Entries multiplied by a nonnegative factor.
  PairwiseDistanceMatrix scaled(double factor) const;

 private:
  Matrix entries_;
};

// L = D - A.
class LaplacianMatrix {
 public:
  explicit LaplacianMatrix(Matrix entries) : entries_(std::move(entries)) {}

  Index size() const { return entries_.rows(); }
  const Matrix& entries() const { return entries_; }

 private:
  Matrix entries_;
};

// Strict upper triangle of a symmetric T x T matrix, row-major:
// (0,1), (0,2), ..., (0,T-1), (1,2), ..., (T-2,T-1).
struct EdgeVector {
  Index nodes = 0;
  Vector values;
};

inline Index edge_count_for(Index nodes) { return nodes * (nodes - 1) / 2; }

// Position of edge (i, j), i < j, in the row-major strict upper triangle.
inline Index edge_position(Index nodes, Index i, Index j) {
  return i * nodes - i * (i + 1) / 2 + (j - i - 1);
}

EdgeVector vectorform(const AdjacencyMatrix& A);
EdgeVector vectorform(const PairwiseDistanceMatrix& Z);
AdjacencyMatrix matrixform(const EdgeVector& w);

// S w == matrixform(w) * 1, accumulated per edge.
Vector apply_degree_operator(const EdgeVector& w);
// S^T v: entry (i, j) is v_i + v_j.
Vector apply_degree_adjoint(Index nodes, const Vector& v);

PairwiseDistanceMatrix pairwise_sq_distances(const WeightMatrix& W);
LaplacianMatrix laplacian(const AdjacencyMatrix& A);

// The three equal forms of the graph smoothness penalty.
//   double sum:  sum_i sum_{j in N(i)} A_ij ||w_i - w_j||^2
//   hadamard:    ||A o Z||_{1,1}
//   trace:       2 tr(W L W^T)   (W is d x T)
double smoothness_double_sum(const WeightMatrix& W, const AdjacencyMatrix& A);
double smoothness_hadamard(const WeightMatrix& W, const AdjacencyMatrix& A);
double smoothness_trace(const WeightMatrix& W, const AdjacencyMatrix& A);

// Hadamard form.
double smoothness(const WeightMatrix& W, const AdjacencyMatrix& A);

}  // namespace gamtl
