#include "gamtl/weight_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gamtl/errors.hpp"

namespace gamtl {

namespace {

void check_graph(const std::vector<TaskDataset>& tasks, const AdjacencyMatrix& A,
                 double gamma) {
  if (A.size() != static_cast<Index>(tasks.size())) {
    throw InvalidInput("graph has " + std::to_string(A.size()) +
                       " nodes for " + std::to_string(tasks.size()) + " tasks");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw InvalidInput("gamma must be finite and nonnegative");
  }
}

}  // namespace

Matrix symmetric_gram(const Matrix& X) {
  Matrix gram = Matrix::Zero(X.rows(), X.rows());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(X);
  return gram.selfadjointView<Eigen::Lower>();
}

Index validate_tasks(const std::vector<TaskDataset>& tasks, bool allow_empty) {
  if (tasks.empty()) throw InvalidInput("no tasks given");
  const Index d = tasks.front().X.rows();
  for (const auto& task : tasks) {
    const std::string tag = "task " + std::to_string(task.task_id);
    if (task.X.rows() != d) {
      throw InvalidInput(tag + ": feature dimension " +
                         std::to_string(task.X.rows()) + " differs from " +
                         std::to_string(d));
    }
    if (task.X.cols() != task.y.size()) {
      throw InvalidInput(tag + ": X has " + std::to_string(task.X.cols()) +
                         " samples but y has " + std::to_string(task.y.size()));
    }
    if (!allow_empty && task.y.size() < 1) {
      throw InvalidInput(tag + ": no samples");
    }
    if (!task.X.allFinite() || !task.y.allFinite()) {
      throw InvalidInput(tag + ": non-finite data");
    }
  }
  return d;
}

double data_loss(const std::vector<TaskDataset>& tasks, const WeightMatrix& W) {
  if (W.cols() != static_cast<Index>(tasks.size())) {
    throw InvalidInput("weight matrix column count differs from task count");
  }
  double loss = 0.0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (tasks[t].X.rows() != W.rows()) {
      throw InvalidInput("weight dimension differs from feature dimension");
    }
    loss += (tasks[t].X.transpose() * W.col(static_cast<Index>(t)) - tasks[t].y)
                .squaredNorm();
  }
  return loss;
}

WeightMatrix ridge_independent(const std::vector<TaskDataset>& tasks,
                               double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidInput("ridge lambda must be finite and nonnegative");
  }
  const Index d = validate_tasks(tasks);
  WeightMatrix W(d, static_cast<Index>(tasks.size()));
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    Matrix gram = symmetric_gram(tasks[t].X);
    gram.diagonal().array() += lambda;
    const Vector rhs = tasks[t].X * tasks[t].y;
    Eigen::LDLT<Matrix> ldlt(gram);
    if (lambda == 0.0) {
      const Vector pivots = ldlt.vectorD();
      const double scale = std::max(pivots.cwiseAbs().maxCoeff(), 1e-300);
      if (ldlt.info() != Eigen::Success || pivots.minCoeff() <= 1e-12 * scale) {
        throw SingularSystem("task " + std::to_string(tasks[t].task_id) +
                             ": normal equations are singular; use lambda > 0");
      }
    }
    W.col(static_cast<Index>(t)) = ldlt.solve(rhs);
  }
  return W;
}

SystemAssembly assemble_system(const std::vector<TaskDataset>& tasks,
                               const AdjacencyMatrix& A, double gamma,
                               double ridge) {
  const Index d = validate_tasks(tasks, /*allow_empty=*/true);
  check_graph(tasks, A, gamma);
  if (!(ridge >= 0.0)) throw InvalidInput("ridge must be nonnegative");
  const Index T = A.size();

  std::vector<Eigen::Triplet<double>> triplets;
  Vector rhs(d * T);
  for (Index t = 0; t < T; ++t) {
    const auto& task = tasks[static_cast<std::size_t>(t)];
    const Matrix gram = symmetric_gram(task.X);
    for (Index r = 0; r < d; ++r) {
      for (Index c = 0; c < d; ++c) {
        if (gram(r, c) != 0.0) triplets.emplace_back(t * d + r, t * d + c, gram(r, c));
      }
      triplets.emplace_back(t * d + r, t * d + r, ridge);
    }
    rhs.segment(t * d, d) = task.X * task.y;
  }
  // gamma * 2 * (L kron I_d), edge by edge.
  for (Index i = 0; i < T; ++i) {
    for (Index j = i + 1; j < T; ++j) {
      const double a = A(i, j);
      if (a == 0.0) continue;
      const double c = 2.0 * gamma * a;
      for (Index r = 0; r < d; ++r) {
        triplets.emplace_back(i * d + r, i * d + r, c);
        triplets.emplace_back(j * d + r, j * d + r, c);
        triplets.emplace_back(i * d + r, j * d + r, -c);
        triplets.emplace_back(j * d + r, i * d + r, -c);
      }
    }
  }
  SystemAssembly system;
  system.M.resize(d * T, d * T);
  system.M.setFromTriplets(triplets.begin(), triplets.end());
  system.rhs = std::move(rhs);
  system.ridge = ridge;
  return system;
}

double default_ridge_floor(const std::vector<TaskDataset>& tasks,
                           const AdjacencyMatrix& A, double gamma) {
  const Index d = validate_tasks(tasks, /*allow_empty=*/true);
  check_graph(tasks, A, gamma);
  double trace = 0.0;
  for (const auto& task : tasks) trace += task.X.squaredNorm();
  trace += 2.0 * gamma * static_cast<double>(d) * A.degrees().sum();
  const double dim = static_cast<double>(d * A.size());
  return trace > 0.0 ? 1e-8 * trace / dim : 1e-8;
}

WeightSystemOperator::WeightSystemOperator(const std::vector<TaskDataset>& tasks,
                                           const AdjacencyMatrix& A,
                                           double gamma, double ridge)
    : ridge_(ridge) {
  d_ = validate_tasks(tasks, /*allow_empty=*/true);
  check_graph(tasks, A, gamma);
  T_ = A.size();
  grams_.reserve(tasks.size());
  rhs_.resize(d_ * T_);
  for (Index t = 0; t < T_; ++t) {
    const auto& task = tasks[static_cast<std::size_t>(t)];
    grams_.push_back(symmetric_gram(task.X));
    rhs_.segment(t * d_, d_) = task.X * task.y;
  }
  for (Index i = 0; i < T_; ++i) {
    for (Index j = i + 1; j < T_; ++j) {
      if (A(i, j) > 0.0) edges_.push_back({i, j, 2.0 * gamma * A(i, j)});
    }
  }
}

void WeightSystemOperator::apply(const Vector& x, Vector& out) const {
  out.resize(dim());
  for (Index t = 0; t < T_; ++t) {
    out.segment(t * d_, d_).noalias() = grams_[static_cast<std::size_t>(t)] *
                                        x.segment(t * d_, d_);
  }
  out += ridge_ * x;
  for (const Edge& e : edges_) {
    const Vector diff = e.weight * (x.segment(e.i * d_, d_) - x.segment(e.j * d_, d_));
    out.segment(e.i * d_, d_) += diff;
    out.segment(e.j * d_, d_) -= diff;
  }
}

Vector WeightSystemOperator::diagonal() const {
  Vector diag(dim());
  for (Index t = 0; t < T_; ++t) {
    diag.segment(t * d_, d_) = grams_[static_cast<std::size_t>(t)].diagonal();
  }
  diag.array() += ridge_;
  for (const Edge& e : edges_) {
    diag.segment(e.i * d_, d_).array() += e.weight;
    diag.segment(e.j * d_, d_).array() += e.weight;
  }
  return diag;
}

Vector stack_columns(const WeightMatrix& W) {
  return Eigen::Map<const Vector>(W.data(), W.size());
}

WeightMatrix unstack_columns(const Vector& v, Index d, Index T) {
  if (v.size() != d * T) throw InvalidInput("stacked vector has wrong length");
  return Eigen::Map<const Matrix>(v.data(), d, T);
}

double weight_objective(const std::vector<TaskDataset>& tasks,
                        const AdjacencyMatrix& A, double gamma,
                        const WeightMatrix& W) {
  check_graph(tasks, A, gamma);
  double value = data_loss(tasks, W);
  if (gamma > 0.0 && A.size() >= 2) value += gamma * smoothness(W, A);
  return value;
}

WeightSolution solve_weights(const std::vector<TaskDataset>& tasks,
                             const AdjacencyMatrix& A, double gamma,
                             double solver_tol, int max_cg_iter,
                             const WeightMatrix& warm_start) {
  if (!(solver_tol > 0.0)) throw InvalidInput("solver tolerance must be positive");
  if (max_cg_iter < 1) throw InvalidInput("max_cg_iter must be at least 1");
  const double ridge = default_ridge_floor(tasks, A, gamma);
  const WeightSystemOperator op(tasks, A, gamma, ridge);
  const Index d = tasks.front().X.rows();
  const Index T = A.size();
  if (warm_start.rows() != d || warm_start.cols() != T) {
    throw InvalidInput("warm start has wrong shape");
  }

  const Vector& b = op.rhs();
  const Vector inv_diag = op.diagonal().cwiseInverse();
  const double b_norm = b.norm();

  WeightSolveReport report;
  report.ridge = ridge;

  Vector x = stack_columns(warm_start);
  Vector r(op.dim());
  Vector Ap(op.dim());
  op.apply(x, Ap);
  r = b - Ap;

  if (b_norm == 0.0) {
    x.setZero();
    report.converged = true;
  } else {
    double rel = r.norm() / b_norm;
    Vector best_x = x;
    double best_rel = rel;
    Vector z = inv_diag.cwiseProduct(r);
    Vector p = z;
    double rz = r.dot(z);
    int k = 0;
    while (rel > solver_tol && k < max_cg_iter) {
      op.apply(p, Ap);
      const double pAp = p.dot(Ap);
      if (!(pAp > 0.0)) break;
      const double step = rz / pAp;
      x.noalias() += step * p;
      r.noalias() -= step * Ap;
      ++k;
      rel = r.norm() / b_norm;
      if (rel < best_rel) {
        best_rel = rel;
        best_x = x;
      }
      z = inv_diag.cwiseProduct(r);
      const double rz_next = r.dot(z);
      p = z + (rz_next / rz) * p;
      rz = rz_next;
    }
    x = std::move(best_x);
    report.iterations = k;
    report.relative_residual = best_rel;
    report.converged = best_rel <= solver_tol;
  }

  WeightMatrix W = unstack_columns(x, d, T);
  if (weight_objective(tasks, A, gamma, W) >
      weight_objective(tasks, A, gamma, warm_start)) {
    W = warm_start;
    report.kept_warm_start = true;
  }
  return WeightSolution{std::move(W), report};
}

}  // namespace gamtl
