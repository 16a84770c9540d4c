#include "gamtl/graph_core.hpp"

#include <cmath>
#include <string>

#include "gamtl/errors.hpp"

namespace gamtl {

namespace {

void check_square_symmetric(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw InvalidInput(std::string(what) + " must be square");
  }
  if (!m.allFinite()) {
    throw InvalidInput(std::string(what) + " has non-finite entries");
  }
  for (Index i = 0; i < m.rows(); ++i) {
    if (m(i, i) != 0.0) {
      throw InvalidInput(std::string(what) + " must have a zero diagonal");
    }
    for (Index j = i + 1; j < m.cols(); ++j) {
      if (m(i, j) != m(j, i)) {
        throw InvalidInput(std::string(what) + " must be symmetric");
      }
      if (m(i, j) < 0.0) {
        throw InvalidInput(std::string(what) + " has a negative entry");
      }
    }
  }
}

void check_same_task_count(const WeightMatrix& W, const AdjacencyMatrix& A) {
  if (W.cols() != A.size()) {
    throw InvalidInput("weight matrix has " + std::to_string(W.cols()) +
                       " columns but the graph has " +
                       std::to_string(A.size()) + " nodes");
  }
}

EdgeVector upper_triangle(const Matrix& m) {
  const Index n = m.rows();
  EdgeVector w{n, Vector(edge_count_for(n))};
  Index e = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      w.values[e++] = m(i, j);
    }
  }
  return w;
}

}  // namespace

AdjacencyMatrix::AdjacencyMatrix(Matrix weights) : weights_(std::move(weights)) {
  check_square_symmetric(weights_, "adjacency matrix");
}

AdjacencyMatrix AdjacencyMatrix::zeros(Index size) {
  return AdjacencyMatrix(Matrix::Zero(size, size));
}

Vector AdjacencyMatrix::degrees() const { return weights_.rowwise().sum(); }

bool AdjacencyMatrix::has_positive_degrees() const {
  return size() > 0 && (degrees().array() > 0.0).all();
}

Index AdjacencyMatrix::edge_count(double threshold) const {
  Index count = 0;
  for (Index i = 0; i < size(); ++i) {
    for (Index j = i + 1; j < size(); ++j) {
      if (weights_(i, j) > threshold) ++count;
    }
  }
  return count;
}

PairwiseDistanceMatrix::PairwiseDistanceMatrix(Matrix entries)
    : entries_(std::move(entries)) {
  check_square_symmetric(entries_, "distance matrix");
}

PairwiseDistanceMatrix PairwiseDistanceMatrix::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor)) {
    throw InvalidInput("distance scale factor must be finite and nonnegative");
  }
  return PairwiseDistanceMatrix(entries_ * factor);
}

EdgeVector vectorform(const AdjacencyMatrix& A) {
  return upper_triangle(A.weights());
}

EdgeVector vectorform(const PairwiseDistanceMatrix& Z) {
  return upper_triangle(Z.entries());
}

AdjacencyMatrix matrixform(const EdgeVector& w) {
  if (w.nodes < 0 || w.values.size() != edge_count_for(w.nodes)) {
    throw InvalidInput("edge vector of length " +
                       std::to_string(w.values.size()) +
                       " does not match " + std::to_string(w.nodes) + " nodes");
  }
  Matrix m = Matrix::Zero(w.nodes, w.nodes);
  Index e = 0;
  for (Index i = 0; i < w.nodes; ++i) {
    for (Index j = i + 1; j < w.nodes; ++j) {
      m(i, j) = w.values[e];
      m(j, i) = w.values[e];
      ++e;
    }
  }
  return AdjacencyMatrix(std::move(m));
}

Vector apply_degree_operator(const EdgeVector& w) {
  if (w.nodes < 0 || w.values.size() != edge_count_for(w.nodes)) {
    throw InvalidInput("edge vector length does not match node count");
  }
  Vector d = Vector::Zero(w.nodes);
  Index e = 0;
  for (Index i = 0; i < w.nodes; ++i) {
    for (Index j = i + 1; j < w.nodes; ++j) {
      d[i] += w.values[e];
      d[j] += w.values[e];
      ++e;
    }
  }
  return d;
}

Vector apply_degree_adjoint(Index nodes, const Vector& v) {
  if (v.size() != nodes) {
    throw InvalidInput("degree vector length does not match node count");
  }
  Vector out(edge_count_for(nodes));
  Index e = 0;
  for (Index i = 0; i < nodes; ++i) {
    for (Index j = i + 1; j < nodes; ++j) {
      out[e++] = v[i] + v[j];
    }
  }
  return out;
}

PairwiseDistanceMatrix pairwise_sq_distances(const WeightMatrix& W) {
  if (W.cols() < 2) {
    throw InvalidInput("need at least two task columns");
  }
  if (!W.allFinite()) {
    throw InvalidInput("weight matrix has non-finite entries");
  }
  const Index T = W.cols();
  Matrix Z = Matrix::Zero(T, T);
  for (Index i = 0; i < T; ++i) {
    for (Index j = i + 1; j < T; ++j) {
      const double z = (W.col(i) - W.col(j)).squaredNorm();
      Z(i, j) = z;
      Z(j, i) = z;
    }
  }
  return PairwiseDistanceMatrix(std::move(Z));
}

LaplacianMatrix laplacian(const AdjacencyMatrix& A) {
  Matrix L = -A.weights();
  L.diagonal() = A.degrees();
  return LaplacianMatrix(std::move(L));
}

double smoothness_double_sum(const WeightMatrix& W, const AdjacencyMatrix& A) {
  check_same_task_count(W, A);
  double total = 0.0;
  for (Index i = 0; i < A.size(); ++i) {
    for (Index j = 0; j < A.size(); ++j) {
      if (A(i, j) > 0.0) {
        total += A(i, j) * (W.col(i) - W.col(j)).squaredNorm();
      }
    }
  }
  return total;
}

double smoothness_hadamard(const WeightMatrix& W, const AdjacencyMatrix& A) {
  check_same_task_count(W, A);
  if (A.size() < 2) return 0.0;
  return A.weights().cwiseProduct(pairwise_sq_distances(W).entries()).sum();
}

double smoothness_trace(const WeightMatrix& W, const AdjacencyMatrix& A) {
  check_same_task_count(W, A);
  const LaplacianMatrix L = laplacian(A);
  return 2.0 * (W * L.entries() * W.transpose()).trace();
}

double smoothness(const WeightMatrix& W, const AdjacencyMatrix& A) {
  return smoothness_hadamard(W, A);
}

}  // namespace gamtl
