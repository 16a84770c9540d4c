#pragma once

#include <vector>

#include "gamtl/graph_core.hpp"

namespace gamtl {

// Parameters of the graph-learning problem
//
//   min_{A valid}  ||A o Z||_{1,1} - alpha * 1^T log(A 1) + beta * ||A||_F^2
//
// and of its primal-dual solver. The solver iterates on the problem rescaled
// to unit mean distance and alpha = 1; `step` applies to that rescaled
// problem, and `step` <= 0 selects 0.9 / (4 beta' + ||S||) with
// ||S|| = sqrt(2 (T - 1)) and beta' the rescaled beta. The best primal-dual
// iterate is then refined by at most `polish_iter` projected Newton steps
// (0 disables), stopping once the rescaled projected gradient is below
// `polish_tol`.
struct GraphLearningParams {
  double alpha = 1.0;
  double beta = 1.0;
  double step = 0.0;
  double tol = 1e-6;
  int max_iter = 10000;
  int polish_iter = 50;
  double polish_tol = 1e-10;
};

void validate(const GraphLearningParams& params);

double default_graph_step(Index nodes, double beta);

struct GraphSolveReport {
  int iterations = 0;
  double final_relative_change = 0.0;
  bool converged = false;
  int polish_iterations = 0;
  double projected_gradient_norm = 0.0;
  // Objective of the best feasible iterate after each iteration; entry 0 is
  // the objective of the initial graph.
  std::vector<double> objective_trace;
};

struct GraphSolution {
  AdjacencyMatrix A;
  GraphSolveReport report;
};

// Throws DomainError when some degree of A is not positive.
double graph_objective(const AdjacencyMatrix& A, const PairwiseDistanceMatrix& Z,
                       const GraphLearningParams& params);

// Same objective on the edge-vector form: 2 z^T w - alpha sum log(S w) +
// 2 beta ||w||^2. Returns +inf when a degree is not positive.
double graph_objective_edges(const EdgeVector& w, const EdgeVector& z,
                             double alpha, double beta);

// Gradient of graph_objective_edges in w.
Vector graph_objective_gradient(const EdgeVector& w, const EdgeVector& z,
                                double alpha, double beta);

// Primal-dual splitting on the edge vector w >= 0 (primal) and the degree
// vector S w (dual, log-barrier). Never throws on non-convergence; the
// report carries the flag and the best feasible iterate is returned.
GraphSolution learn_graph(const PairwiseDistanceMatrix& Z,
                          const GraphLearningParams& params,
                          const AdjacencyMatrix& A0);

// Fully connected similarity graph A0[i][j] = exp(-Z[i][j] / mean(Z)).
AdjacencyMatrix default_initial_graph(const PairwiseDistanceMatrix& Z);

}  // namespace gamtl
