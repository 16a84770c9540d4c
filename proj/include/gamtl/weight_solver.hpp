#pragma once

#include <vector>

#include <Eigen/Sparse>

#include "gamtl/graph_core.hpp"

namespace gamtl {

// One task's training data. Columns of X are samples.
struct TaskDataset {
  int task_id = 0;
  Matrix X;  // d x N_t
  Vector y;  // N_t
};

// Checks N_t >= 1 (unless `allow_empty`), finite entries, common d.
// Returns d.
Index validate_tasks(const std::vector<TaskDataset>& tasks,
                     bool allow_empty = false);

// X X^T with bitwise-identical mirrored triangles.
Matrix symmetric_gram(const Matrix& X);

// sum_t ||w_t^T X_t - y_t||^2
double data_loss(const std::vector<TaskDataset>& tasks, const WeightMatrix& W);

// Per-task ridge regression, w_t = (X_t X_t^T + lambda I)^{-1} X_t y_t.
// Throws SingularSystem when lambda == 0 and some X_t X_t^T is singular.
WeightMatrix ridge_independent(const std::vector<TaskDataset>& tasks,
                               double lambda);

// M = C + gamma * B + ridge * I and rhs = D, where C = blockdiag(X_t X_t^T),
// B = 2 (L kron I_d) and D stacks X_t y_t. vec(W) stacks the columns of W.
struct SystemAssembly {
  Eigen::SparseMatrix<double> M;
  Vector rhs;
  double ridge = 0.0;
};

SystemAssembly assemble_system(const std::vector<TaskDataset>& tasks,
                               const AdjacencyMatrix& A, double gamma,
                               double ridge);

// Diagonal floor 1e-8 * trace(C + gamma B) / (d T) keeping the system
// positive definite. Falls back to 1e-8 when the trace is zero.
double default_ridge_floor(const std::vector<TaskDataset>& tasks,
                           const AdjacencyMatrix& A, double gamma);

// Matrix-free product with M: per-task Gram blocks plus per-edge
// difference accumulation, in a fixed summation order.
class WeightSystemOperator {
 public:
  WeightSystemOperator(const std::vector<TaskDataset>& tasks,
                       const AdjacencyMatrix& A, double gamma, double ridge);

  Index dim() const { return d_ * T_; }
  void apply(const Vector& x, Vector& out) const;
  Vector diagonal() const;
  const Vector& rhs() const { return rhs_; }

 private:
  struct Edge {
    Index i;
    Index j;
    double weight;  // 2 * gamma * A_ij
  };

  Index d_ = 0;
  Index T_ = 0;
  double ridge_ = 0.0;
  std::vector<Matrix> grams_;
  std::vector<Edge> edges_;
  Vector rhs_;
};

struct WeightSolveReport {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  // True when the solve did not improve the objective and the warm start
  // was returned instead.
  bool kept_warm_start = false;
  double ridge = 0.0;
};

struct WeightSolution {
  WeightMatrix W;
  WeightSolveReport report;
};

// Graph-regularized least squares
//   min_W sum_t ||w_t^T X_t - y_t||^2 + gamma ||A o Z(W)||_{1,1}
// by Jacobi-preconditioned conjugate gradient started at `warm_start`.
// Stagnation is reported, never thrown.
WeightSolution solve_weights(const std::vector<TaskDataset>& tasks,
                             const AdjacencyMatrix& A, double gamma,
                             double solver_tol, int max_cg_iter,
                             const WeightMatrix& warm_start);

// The quadratic objective minimized by solve_weights (without the floor).
double weight_objective(const std::vector<TaskDataset>& tasks,
                        const AdjacencyMatrix& A, double gamma,
                        const WeightMatrix& W);

// vec / unvec between a d x T matrix and its stacked columns.
Vector stack_columns(const WeightMatrix& W);
WeightMatrix unstack_columns(const Vector& v, Index d, Index T);

}  // namespace gamtl
