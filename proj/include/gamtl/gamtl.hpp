#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gamtl/graph_learning.hpp"
#include "gamtl/rbf.hpp"
#include "gamtl/weight_solver.hpp"

namespace gamtl {

struct GamtlConfig {
  double gamma = 1.0;
  GraphLearningParams graph_params;
  double outer_tol = 1e-5;
  int max_outer_iter = 50;
  double weight_solver_tol = 1e-10;
  int max_cg_iter = 5000;
  // Ridge strength for the independent initial models W0.
  double ridge_lambda = 1.0;
  // When false the graph stays at its initial value (used with gamma = 0).
  bool learn_graph = true;
  std::uint64_t seed = 0;
};

void validate(const GamtlConfig& config);

enum class FitStatus { kConverged, kMaxIterations, kNumericalFailure };

const char* to_string(FitStatus status);

struct OuterIteration {
  double objective_after_weights = 0.0;
  double objective_after_graph = 0.0;
  WeightSolveReport weight_report;
  int graph_iterations = 0;
  bool graph_converged = false;
};

struct FitTrace {
  double initial_objective = 0.0;
  std::vector<OuterIteration> iterations;
  // Scalar sequence: initial value, then the objective after every block
  // update (weights, graph, weights, graph, ...).
  std::vector<double> objective_sequence() const;
};

struct GamtlModel {
  std::vector<int> task_ids;
  WeightMatrix W;
  AdjacencyMatrix A;
  std::optional<RbfFeatureMap> feature_map;
  GamtlConfig config;
  FitTrace trace;
  FitStatus status = FitStatus::kConverged;
  std::vector<std::string> warnings;

  Index task_count() const { return W.cols(); }
  Index task_index(int task_id) const;
};

// sum_t ||w_t^T X_t - y_t||^2 + gamma ||A o Z||_{1,1} - alpha 1^T log(A 1)
//   + beta ||A||_F^2, with Z = pairwise_sq_distances(W).
// Throws DomainError on a zero degree.
double joint_objective(const WeightMatrix& W, const AdjacencyMatrix& A,
                       const std::vector<TaskDataset>& tasks,
                       const GamtlConfig& config);

// Alternating minimization: weights given the graph, then the graph given
// the weights, until the relative objective change drops below outer_tol.
// Inner-solver trouble is reported on the model, not thrown.
GamtlModel fit(const std::vector<TaskDataset>& tasks, const GamtlConfig& config);

// Same alternation from explicit starting points.
GamtlModel fit_from(const std::vector<TaskDataset>& tasks,
                    const GamtlConfig& config, const WeightMatrix& W0,
                    const AdjacencyMatrix& A0);

// w_t^T x, or w_t^T lift(x) when the model carries a feature map.
double predict(const GamtlModel& model, int task_id, const Vector& x);
Vector predict_batch(const GamtlModel& model, int task_id, const Matrix& X);

// Gradient of the joint objective in W (d x T).
WeightMatrix joint_gradient_weights(const WeightMatrix& W,
                                    const AdjacencyMatrix& A,
                                    const std::vector<TaskDataset>& tasks,
                                    double gamma);

// Norm of the joint objective's gradient in the edge vector, projected on
// the nonnegative orthant (components at zero keep only negative parts).
double projected_graph_gradient_norm(const WeightMatrix& W,
                                     const AdjacencyMatrix& A,
                                     const GamtlConfig& config);

// Grid for k-fold cross validation over (gamma, alpha, beta).
struct HyperparameterGrid {
  std::vector<double> gamma{1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2};
  std::vector<double> alpha{1e-2, 1e-1, 1.0, 1e1};
  std::vector<double> beta{1e-2, 1e-1, 1.0, 1e1};
};

struct CrossValidationResult {
  double gamma = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double best_mse = 0.0;
  // One row per grid point: gamma, alpha, beta, mean validation MSE.
  std::vector<std::array<double, 4>> scores;
};

// Per-task k-fold split of the training samples; validation error is
// pooled over all held-out samples.
CrossValidationResult cross_validate(const std::vector<TaskDataset>& tasks,
                                     const GamtlConfig& base,
                                     const HyperparameterGrid& grid,
                                     int folds = 5);

}  // namespace gamtl
