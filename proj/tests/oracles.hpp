#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Everything here is written from the definitions with plain loops and dense
// Eigen solves; nothing calls into the library's solvers.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

// Symmetric, zero diagonal, entries U(lo, hi).
inline Matrix random_symmetric(std::mt19937_64& rng, Index T, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix A = Matrix::Zero(T, T);
  for (Index i = 0; i < T; ++i)
    for (Index j = i + 1; j < T; ++j) A(i, j) = A(j, i) = u(rng);
  return A;
}

inline Matrix sq_distances(const Matrix& W) {
  const Index T = W.cols();
  Matrix Z = Matrix::Zero(T, T);
  for (Index i = 0; i < T; ++i) {
    for (Index j = 0; j < T; ++j) {
      double s = 0.0;
      for (Index k = 0; k < W.rows(); ++k) {
        const double diff = W(k, i) - W(k, j);
        s += diff * diff;
      }
      Z(i, j) = s;
    }
  }
  return Z;
}

inline double graph_objective(const Matrix& A, const Matrix& Z, double alpha, double beta) {
  double value = 0.0;
  for (Index i = 0; i < A.rows(); ++i) {
    double degree = 0.0;
    for (Index j = 0; j < A.cols(); ++j) {
      value += A(i, j) * Z(i, j) + beta * A(i, j) * A(i, j);
      degree += A(i, j);
    }
    value -= alpha * std::log(degree);
  }
  return value;
}

inline double data_loss(const std::vector<Matrix>& X, const std::vector<Vector>& y, const Matrix& W) {
  double loss = 0.0;
  for (std::size_t t = 0; t < X.size(); ++t) {
    for (Index n = 0; n < X[t].cols(); ++n) {
      double pred = 0.0;
      for (Index k = 0; k < X[t].rows(); ++k) pred += W(k, static_cast<Index>(t)) * X[t](k, n);
      loss += (pred - y[t][n]) * (pred - y[t][n]);
    }
  }
  return loss;
}

// Positive root of 2 beta a^2 + z a - alpha = 0: the optimal single edge.
inline double two_node_edge(double z, double alpha, double beta) {
  return (-z + std::sqrt(z * z + 8.0 * alpha * beta)) / (4.0 * beta);
}

// Uniform complete graph on T nodes with all distances z: per-node degree
// (T-1) a, so the objective is T (T-1) (z a + beta a^2) - alpha T log((T-1) a).
// Stationarity: 2 beta (T-1) a^2 + (T-1) z a - alpha = 0. Solved by bisection.
inline double uniform_edge(Index T, double z, double alpha, double beta) {
  const double n = static_cast<double>(T - 1);
  auto f = [&](double a) { return 2.0 * beta * n * a * a + n * z * a - alpha; };
  double lo = 0.0, hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Projected gradient descent on the matrix objective over symmetric A >= 0,
// parametrized by the upper triangle. Derivative of the full objective in
// the shared entry a_ij: 2 z_ij - alpha (1/d_i + 1/d_j) + 4 beta a_ij.
inline Matrix projected_gradient_graph(const Matrix& Z, double alpha, double beta,
                                       double step, long iterations) {
  const Index T = Z.rows();
  Matrix A = Matrix::Ones(T, T);
  A.diagonal().setZero();
  Vector d(T);
  for (long it = 0; it < iterations; ++it) {
    for (Index i = 0; i < T; ++i) d[i] = A.row(i).sum();
    for (Index i = 0; i < T; ++i) {
      for (Index j = i + 1; j < T; ++j) {
        const double g = 2.0 * Z(i, j) - alpha * (1.0 / d[i] + 1.0 / d[j]) + 4.0 * beta * A(i, j);
        A(i, j) = A(j, i) = std::max(A(i, j) - step * g, 0.0);
      }
    }
  }
  return A;
}

// Dense M = blockdiag(X_t X_t^T) + gamma * 2 (L kron I_d) + ridge I, built
// entry by entry from the per-edge neighbour sums.
inline Matrix dense_system(const std::vector<Matrix>& X, const Matrix& A, double gamma, double ridge) {
  const Index T = A.rows();
  const Index d = X.front().rows();
  Matrix M = Matrix::Zero(d * T, d * T);
  for (Index t = 0; t < T; ++t) M.block(t * d, t * d, d, d) += X[static_cast<std::size_t>(t)] * X[static_cast<std::size_t>(t)].transpose();
  for (Index i = 0; i < T; ++i) {
    for (Index j = 0; j < T; ++j) {
      if (i == j) continue;
      // Half the Hessian of gamma sum_i sum_j A_ij ||w_i - w_j||^2, where the
      // ordered pairs (i, j) and (j, i) both appear in the double sum.
      for (Index k = 0; k < d; ++k) {
        M(i * d + k, i * d + k) += 2.0 * gamma * A(i, j);
        M(i * d + k, j * d + k) -= 2.0 * gamma * A(i, j);
      }
    }
  }
  M.diagonal().array() += ridge;
  return M;
}

inline Vector dense_rhs(const std::vector<Matrix>& X, const std::vector<Vector>& y) {
  const Index d = X.front().rows();
  Vector r(d * static_cast<Index>(X.size()));
  for (std::size_t t = 0; t < X.size(); ++t) r.segment(static_cast<Index>(t) * d, d) = X[t] * y[t];
  return r;
}

inline Vector ridge_solve(const Matrix& X, const Vector& y, double lambda) {
  Matrix G = X * X.transpose();
  G.diagonal().array() += lambda;
  return G.fullPivLu().solve(X * y);
}

inline std::vector<double> nearest_other(const Matrix& centers) {
  std::vector<double> out;
  for (Index p = 0; p < centers.cols(); ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (Index q = 0; q < centers.cols(); ++q) {
      if (q != p) best = std::min(best, (centers.col(p) - centers.col(q)).norm());
    }
    out.push_back(best);
  }
  return out;
}

// Exhaustive optimal 2-clustering of a small point set (at most ~16 points).
inline std::pair<Vector, Vector> best_two_means(const Matrix& pts) {
  const Index n = pts.cols();
  double best = std::numeric_limits<double>::infinity();
  std::pair<Vector, Vector> out;
  for (long mask = 1; mask < (1L << (n - 1)); ++mask) {
    Vector a = Vector::Zero(pts.rows()), b = Vector::Zero(pts.rows());
    int na = 0, nb = 0;
    for (Index i = 0; i < n; ++i) {
      if (mask & (1L << i)) { a += pts.col(i); ++na; } else { b += pts.col(i); ++nb; }
    }
    a /= na;
    b /= nb;
    double cost = 0.0;
    for (Index i = 0; i < n; ++i) cost += ((mask & (1L << i)) ? (pts.col(i) - a) : (pts.col(i) - b)).squaredNorm();
    if (cost < best) {
      best = cost;
      out = {a, b};
    }
  }
  return out;
}

}  // namespace oracle
