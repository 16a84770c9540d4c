#include "gamtl/gamtl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gamtl/errors.hpp"
#include "gamtl/random.hpp"

namespace gamtl {

void validate(const GamtlConfig& config) {
  if (!(config.gamma >= 0.0) || !std::isfinite(config.gamma)) {
    throw InvalidInput("gamma must be finite and nonnegative");
  }
  validate(config.graph_params);
  if (!(config.outer_tol > 0.0 && config.outer_tol < 1.0)) {
    throw InvalidInput("outer_tol must lie in (0, 1)");
  }
  if (config.max_outer_iter < 1) {
    throw InvalidInput("max_outer_iter must be at least 1");
  }
  if (!(config.weight_solver_tol > 0.0)) {
    throw InvalidInput("weight_solver_tol must be positive");
  }
  if (config.max_cg_iter < 1) {
    throw InvalidInput("max_cg_iter must be at least 1");
  }
  if (!(config.ridge_lambda >= 0.0) || !std::isfinite(config.ridge_lambda)) {
    throw InvalidInput("ridge_lambda must be finite and nonnegative");
  }
}

const char* to_string(FitStatus status) {
  switch (status) {
    case FitStatus::kConverged: return "converged";
    case FitStatus::kMaxIterations: return "max_iterations";
    case FitStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

std::vector<double> FitTrace::objective_sequence() const {
  std::vector<double> out{initial_objective};
  for (const auto& it : iterations) {
    out.push_back(it.objective_after_weights);
    out.push_back(it.objective_after_graph);
  }
  return out;
}

Index GamtlModel::task_index(int task_id) const {
  const auto it = std::find(task_ids.begin(), task_ids.end(), task_id);
  if (it == task_ids.end()) {
    throw InvalidInput("unknown task id " + std::to_string(task_id));
  }
  return static_cast<Index>(it - task_ids.begin());
}

double joint_objective(const WeightMatrix& W, const AdjacencyMatrix& A,
                       const std::vector<TaskDataset>& tasks,
                       const GamtlConfig& config) {
  if (A.size() != W.cols()) {
    throw InvalidInput("graph size differs from the number of weight columns");
  }
  const PairwiseDistanceMatrix Z = pairwise_sq_distances(W).scaled(config.gamma);
  return data_loss(tasks, W) + graph_objective(A, Z, config.graph_params);
}

GamtlModel fit(const std::vector<TaskDataset>& tasks, const GamtlConfig& config) {
  validate(config);
  if (tasks.size() < 2) {
    throw InvalidInput("multi-task fitting needs at least two tasks");
  }
  const WeightMatrix W0 = ridge_independent(tasks, config.ridge_lambda);
  const AdjacencyMatrix A0 = default_initial_graph(pairwise_sq_distances(W0));
  return fit_from(tasks, config, W0, A0);
}

GamtlModel fit_from(const std::vector<TaskDataset>& tasks,
                    const GamtlConfig& config, const WeightMatrix& W0,
                    const AdjacencyMatrix& A0) {
  validate(config);
  if (tasks.size() < 2) {
    throw InvalidInput("multi-task fitting needs at least two tasks");
  }
  const Index d = validate_tasks(tasks);
  const Index T = static_cast<Index>(tasks.size());
  if (W0.rows() != d || W0.cols() != T) {
    throw InvalidInput("initial weights have the wrong shape");
  }
  if (A0.size() != T || !A0.has_positive_degrees()) {
    throw InvalidInput("initial graph must have one node per task and positive degrees");
  }

  GamtlModel model;
  model.config = config;
  for (const auto& task : tasks) model.task_ids.push_back(task.task_id);
  model.W = W0;
  model.A = A0;
  model.status = FitStatus::kMaxIterations;

  double current = joint_objective(model.W, model.A, tasks, config);
  model.trace.initial_objective = current;
  if (!std::isfinite(current)) {
    model.status = FitStatus::kNumericalFailure;
    model.warnings.push_back("initial objective is not finite");
    return model;
  }

  bool warned_weights = false;
  bool warned_graph = false;
  for (int k = 1; k <= config.max_outer_iter; ++k) {
    const double previous = current;
    OuterIteration record;

    WeightSolution ws = solve_weights(tasks, model.A, config.gamma,
                                      config.weight_solver_tol,
                                      config.max_cg_iter, model.W);
    record.weight_report = ws.report;
    if (!ws.report.converged && !ws.report.kept_warm_start && !warned_weights) {
      model.warnings.push_back("weight solve stopped at relative residual " +
                               std::to_string(ws.report.relative_residual) +
                               " (outer iteration " + std::to_string(k) + ")");
      warned_weights = true;
    }
    if (!ws.W.allFinite()) {
      model.status = FitStatus::kNumericalFailure;
      model.warnings.push_back("weight iterate is not finite");
      break;
    }
    const double after_weights = joint_objective(ws.W, model.A, tasks, config);
    if (after_weights <= current) {
      model.W = std::move(ws.W);
      current = after_weights;
    }
    record.objective_after_weights = current;

    if (config.learn_graph) {
      const PairwiseDistanceMatrix Z =
          pairwise_sq_distances(model.W).scaled(config.gamma);
      GraphSolution gs = learn_graph(Z, config.graph_params, model.A);
      record.graph_iterations = gs.report.iterations;
      record.graph_converged = gs.report.converged;
      if (!gs.report.converged && !warned_graph) {
        model.warnings.push_back("graph solve hit max_iter (outer iteration " +
                                 std::to_string(k) + ")");
        warned_graph = true;
      }
      if (gs.A.has_positive_degrees()) {
        const double after_graph = joint_objective(model.W, gs.A, tasks, config);
        if (after_graph <= current) {
          model.A = std::move(gs.A);
          current = after_graph;
        }
      }
    }
    record.objective_after_graph = current;

    model.trace.iterations.push_back(record);

    if (!std::isfinite(current)) {
      model.status = FitStatus::kNumericalFailure;
      model.warnings.push_back("objective is not finite");
      break;
    }
    const double scale = std::max(std::abs(previous), 1e-300);
    if (std::abs(previous - current) / scale < config.outer_tol) {
      model.status = FitStatus::kConverged;
      break;
    }
  }
  return model;
}

double predict(const GamtlModel& model, int task_id, const Vector& x) {
  const Index t = model.task_index(task_id);
  if (model.feature_map) {
    if (x.size() != model.feature_map->input_dim()) {
      throw InvalidInput("input has dimension " + std::to_string(x.size()) +
                         ", expected " +
                         std::to_string(model.feature_map->input_dim()));
    }
    return model.W.col(t).dot(lift(*model.feature_map, x).col(0));
  }
  if (x.size() != model.W.rows()) {
    throw InvalidInput("input has dimension " + std::to_string(x.size()) +
                       ", expected " + std::to_string(model.W.rows()));
  }
  return model.W.col(t).dot(x);
}

Vector predict_batch(const GamtlModel& model, int task_id, const Matrix& X) {
  const Index t = model.task_index(task_id);
  if (model.feature_map) {
    if (X.rows() != model.feature_map->input_dim()) {
      throw InvalidInput("input dimension does not match the feature map");
    }
    return lift(*model.feature_map, X).transpose() * model.W.col(t);
  }
  if (X.rows() != model.W.rows()) {
    throw InvalidInput("input dimension does not match the model");
  }
  return X.transpose() * model.W.col(t);
}

WeightMatrix joint_gradient_weights(const WeightMatrix& W,
                                    const AdjacencyMatrix& A,
                                    const std::vector<TaskDataset>& tasks,
                                    double gamma) {
  if (W.cols() != static_cast<Index>(tasks.size()) || A.size() != W.cols()) {
    throw InvalidInput("shape mismatch between weights, graph and tasks");
  }
  WeightMatrix grad(W.rows(), W.cols());
  for (Index t = 0; t < W.cols(); ++t) {
    const auto& task = tasks[static_cast<std::size_t>(t)];
    grad.col(t) = 2.0 * task.X * (task.X.transpose() * W.col(t) - task.y);
  }
  grad += 4.0 * gamma * W * laplacian(A).entries();
  return grad;
}

double projected_graph_gradient_norm(const WeightMatrix& W,
                                     const AdjacencyMatrix& A,
                                     const GamtlConfig& config) {
  const EdgeVector w = vectorform(A);
  const EdgeVector z = vectorform(pairwise_sq_distances(W).scaled(config.gamma));
  Vector g = graph_objective_gradient(w, z, config.graph_params.alpha,
                                      config.graph_params.beta);
  for (Index e = 0; e < g.size(); ++e) {
    if (w.values[e] <= 0.0) g[e] = std::min(g[e], 0.0);
  }
  return g.norm();
}

namespace {

// fold[t][i] is the fold of sample i of task t.
std::vector<std::vector<int>> assign_folds(const std::vector<TaskDataset>& tasks,
                                           int folds, std::uint64_t seed) {
  Rng rng(derive_seed(seed, streams::kFolds));
  std::vector<std::vector<int>> out;
  for (const auto& task : tasks) {
    std::vector<Index> order(static_cast<std::size_t>(task.y.size()));
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> fold(order.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      fold[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos) % folds;
    }
    out.push_back(std::move(fold));
  }
  return out;
}

TaskDataset select_samples(const TaskDataset& task, const std::vector<int>& fold,
                           int which, bool inside) {
  std::vector<Index> keep;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    if ((fold[i] == which) == inside) keep.push_back(static_cast<Index>(i));
  }
  TaskDataset out;
  out.task_id = task.task_id;
  out.X.resize(task.X.rows(), static_cast<Index>(keep.size()));
  out.y.resize(static_cast<Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    out.X.col(static_cast<Index>(c)) = task.X.col(keep[c]);
    out.y[static_cast<Index>(c)] = task.y[keep[c]];
  }
  return out;
}

}  // namespace

CrossValidationResult cross_validate(const std::vector<TaskDataset>& tasks,
                                     const GamtlConfig& base,
                                     const HyperparameterGrid& grid, int folds) {
  validate(base);
  validate_tasks(tasks);
  if (folds < 2) throw InvalidInput("cross validation needs at least two folds");
  for (const auto& task : tasks) {
    if (task.y.size() < 2) {
      throw InvalidInput("task " + std::to_string(task.task_id) +
                         " has fewer than two samples");
    }
  }
  const auto fold_of = assign_folds(tasks, folds, base.seed);

  CrossValidationResult result;
  result.best_mse = std::numeric_limits<double>::infinity();
  for (double gamma : grid.gamma) {
    for (double alpha : grid.alpha) {
      for (double beta : grid.beta) {
        GamtlConfig config = base;
        config.gamma = gamma;
        config.graph_params.alpha = alpha;
        config.graph_params.beta = beta;
        double sse = 0.0;
        Index count = 0;
        for (int f = 0; f < folds; ++f) {
          std::vector<TaskDataset> train;
          std::vector<TaskDataset> held_out;
          for (std::size_t t = 0; t < tasks.size(); ++t) {
            train.push_back(select_samples(tasks[t], fold_of[t], f, false));
            held_out.push_back(select_samples(tasks[t], fold_of[t], f, true));
          }
          const GamtlModel model = fit(train, config);
          for (const auto& task : held_out) {
            if (task.y.size() == 0) continue;
            sse += (predict_batch(model, task.task_id, task.X) - task.y).squaredNorm();
            count += task.y.size();
          }
        }
        const double mse = sse / static_cast<double>(std::max<Index>(count, 1));
        result.scores.push_back({gamma, alpha, beta, mse});
        if (mse < result.best_mse) {
          result.best_mse = mse;
          result.gamma = gamma;
          result.alpha = alpha;
          result.beta = beta;
        }
      }
    }
  }
  return result;
}

}  // namespace gamtl
