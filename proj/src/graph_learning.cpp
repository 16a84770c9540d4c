#include "gamtl/graph_learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gamtl/errors.hpp"

namespace gamtl {

namespace {

// Projected Newton refinement of the unit-scale edge problem
//   f(w) = 2 z^T w - sum log(S w) + 2 beta ||w||^2,  w >= 0.
// Edges pinned at zero with a positive gradient are held fixed; the rest
// take a Newton step, followed by an Armijo search along the projection arc.
// Returns the number of accepted steps; `pg_norm` receives the final
// projected gradient norm (infinity norm).
int newton_polish(Vector& w, const Vector& z, double beta, Index T, int max_iter,
                  double tol, double& pg_norm) {
  const Index m = w.size();
  std::vector<Index> ei(static_cast<std::size_t>(m)), ej(static_cast<std::size_t>(m));
  for (Index i = 0, e = 0; i < T; ++i) {
    for (Index j = i + 1; j < T; ++j, ++e) {
      ei[static_cast<std::size_t>(e)] = i;
      ej[static_cast<std::size_t>(e)] = j;
    }
  }
  auto objective = [&](const Vector& x) {
    const Vector d = apply_degree_operator(EdgeVector{T, x});
    if (!(d.array() > 0.0).all()) return std::numeric_limits<double>::infinity();
    return 2.0 * z.dot(x) - d.array().log().sum() + 2.0 * beta * x.squaredNorm();
  };

  int steps = 0;
  pg_norm = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const Vector d = apply_degree_operator(EdgeVector{T, w});
    if (!(d.array() > 0.0).all()) break;
    const Vector g =
        2.0 * z - apply_degree_adjoint(T, d.cwiseInverse()) + 4.0 * beta * w;
    pg_norm = (w - (w - g).cwiseMax(0.0)).lpNorm<Eigen::Infinity>();
    if (pg_norm <= tol) break;

    const double eps = std::min(1e-3, pg_norm);
    std::vector<Index> free;
    std::vector<Index> slot(static_cast<std::size_t>(m), -1);
    for (Index e = 0; e < m; ++e) {
      if (!(w[e] <= eps && g[e] > 0.0)) {
        slot[static_cast<std::size_t>(e)] = static_cast<Index>(free.size());
        free.push_back(e);
      }
    }
    const Vector dinv2 = d.cwiseInverse().cwiseAbs2();
    Vector dir = Vector::Zero(m);
    // Pinned edges move along a diagonally scaled gradient.
    for (Index e = 0; e < m; ++e) {
      if (slot[static_cast<std::size_t>(e)] < 0) {
        const double h = dinv2[ei[e]] + dinv2[ej[e]] + 4.0 * beta;
        dir[e] = -g[e] / h;
      }
    }
    if (!free.empty()) {
      const Index nf = static_cast<Index>(free.size());
      // Hessian of the log barrier: edges sharing a node couple through it.
      Matrix H = Matrix::Zero(nf, nf);
      for (Index a = 0; a < nf; ++a) {
        const Index e = free[static_cast<std::size_t>(a)];
        for (Index b = a; b < nf; ++b) {
          const Index f = free[static_cast<std::size_t>(b)];
          double h = 0.0;
          if (ei[e] == ei[f] || ei[e] == ej[f]) h += dinv2[ei[e]];
          if (ej[e] == ei[f] || ej[e] == ej[f]) h += dinv2[ej[e]];
          H(a, b) = h;
          H(b, a) = h;
        }
        H(a, a) += 4.0 * beta;
      }
      Vector gf(nf);
      for (Index a = 0; a < nf; ++a) gf[a] = g[free[static_cast<std::size_t>(a)]];
      const Eigen::LLT<Matrix> llt(H);
      if (llt.info() != Eigen::Success) break;
      const Vector step = -llt.solve(gf);
      for (Index a = 0; a < nf; ++a) dir[free[static_cast<std::size_t>(a)]] = step[a];
    }

    const double f0 = objective(w);
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      const Vector trial = (w + t * dir).cwiseMax(0.0);
      const double f1 = objective(trial);
      if (std::isfinite(f1) && f1 <= f0 + 1e-4 * g.dot(trial - w)) {
        accepted = f1 <= f0;
        if (accepted) w = trial;
        break;
      }
    }
    if (!accepted) break;
    ++steps;
  }
  return steps;
}

}  // namespace

void validate(const GraphLearningParams& params) {
  if (!(params.alpha > 0.0) || !std::isfinite(params.alpha)) {
    throw InvalidInput("graph alpha must be positive");
  }
  if (!(params.beta > 0.0) || !std::isfinite(params.beta)) {
    throw InvalidInput("graph beta must be positive");
  }
  if (!std::isfinite(params.step)) {
    throw InvalidInput("graph step must be finite");
  }
  if (!(params.tol > 0.0 && params.tol < 1.0)) {
    throw InvalidInput("graph tol must lie in (0, 1)");
  }
  if (params.max_iter < 1) {
    throw InvalidInput("graph max_iter must be at least 1");
  }
  if (params.polish_iter < 0) {
    throw InvalidInput("graph polish_iter must be non-negative");
  }
  if (!(params.polish_tol > 0.0)) {
    throw InvalidInput("graph polish_tol must be positive");
  }
}

double default_graph_step(Index nodes, double beta) {
  const double s_norm = std::sqrt(2.0 * static_cast<double>(nodes - 1));
  return 0.9 / (4.0 * beta + s_norm);
}

double graph_objective_edges(const EdgeVector& w, const EdgeVector& z,
                             double alpha, double beta) {
  const Vector degrees = apply_degree_operator(w);
  if (!(degrees.array() > 0.0).all()) {
    return std::numeric_limits<double>::infinity();
  }
  return 2.0 * z.values.dot(w.values) -
         alpha * degrees.array().log().sum() +
         2.0 * beta * w.values.squaredNorm();
}

Vector graph_objective_gradient(const EdgeVector& w, const EdgeVector& z,
                                double alpha, double beta) {
  const Vector degrees = apply_degree_operator(w);
  const Vector inv = degrees.cwiseInverse();
  return 2.0 * z.values - alpha * apply_degree_adjoint(w.nodes, inv) +
         4.0 * beta * w.values;
}

double graph_objective(const AdjacencyMatrix& A, const PairwiseDistanceMatrix& Z,
                       const GraphLearningParams& params) {
  if (A.size() != Z.size()) {
    throw InvalidInput("graph and distance matrix sizes differ");
  }
  const Vector degrees = A.degrees();
  for (Index i = 0; i < degrees.size(); ++i) {
    if (!(degrees[i] > 0.0)) {
      throw DomainError("node " + std::to_string(i) +
                        " has zero degree; log barrier undefined");
    }
  }
  return A.weights().cwiseProduct(Z.entries()).sum() -
         params.alpha * degrees.array().log().sum() +
         params.beta * A.weights().squaredNorm();
}

GraphSolution learn_graph(const PairwiseDistanceMatrix& Z,
                          const GraphLearningParams& params,
                          const AdjacencyMatrix& A0) {
  validate(params);
  const Index T = Z.size();
  if (T < 2) throw InvalidInput("graph learning needs at least two nodes");
  if (A0.size() != T) {
    throw InvalidInput("initial graph size does not match distance matrix");
  }
  if (!A0.has_positive_degrees()) {
    throw InvalidInput("initial graph must have positive degrees");
  }

  const EdgeVector z = vectorform(Z);

  // Iterate on a unit-scale problem. With s the mean distance,
  // A*(Z, alpha, beta) = (alpha / s) A*(Z / s, 1, alpha beta / s^2), which
  // keeps the prox steps well conditioned whatever the scale of Z and alpha.
  double s = z.values.size() > 0 ? z.values.mean() : 0.0;
  if (!(s > 0.0) || !std::isfinite(s)) s = 1.0;
  const double unscale = params.alpha / s;
  const double beta = params.beta * params.alpha / (s * s);
  const double step = params.step > 0.0 ? params.step : default_graph_step(T, beta);
  const Vector zs = z.values / s;

  // w: primal edge weights, v: dual degree variable.
  EdgeVector w = vectorform(A0);
  w.values /= unscale;
  Vector v = apply_degree_operator(w);

  EdgeVector best = vectorform(A0);
  double best_objective = graph_objective_edges(best, z, params.alpha, params.beta);

  GraphSolveReport report;
  report.objective_trace.push_back(best_objective);

  EdgeVector p{T, Vector(w.values.size())};
  EdgeVector candidate{T, Vector(w.values.size())};
  for (int k = 1; k <= params.max_iter; ++k) {
    const Vector y = w.values - step * (4.0 * beta * w.values +
                                        apply_degree_adjoint(T, v));
    const Vector y_bar = v + step * apply_degree_operator(w);

    p.values = (y - 2.0 * step * zs).cwiseMax(0.0);
    const Vector p_bar =
        (y_bar.array() - (y_bar.array().square() + 4.0 * step).sqrt()) / 2.0;

    const Vector q = p.values - step * (4.0 * beta * p.values +
                                        apply_degree_adjoint(T, p_bar));
    const Vector q_bar = p_bar + step * apply_degree_operator(p);

    const double w_norm = std::max(w.values.norm(), 1e-300);
    const double v_norm = std::max(v.norm(), 1e-300);
    const double primal_change = (q - y).norm() / w_norm;
    const double dual_change = (q_bar - y_bar).norm() / v_norm;

    w.values += q - y;
    v += q_bar - y_bar;

    candidate.values = unscale * p.values;
    const double objective =
        graph_objective_edges(candidate, z, params.alpha, params.beta);
    if (objective < best_objective) {
      best_objective = objective;
      best.values = candidate.values;
    }
    report.objective_trace.push_back(best_objective);
    report.iterations = k;
    report.final_relative_change = std::max(primal_change, dual_change);

    if (!w.values.allFinite() || !v.allFinite()) break;
    if (primal_change < params.tol && dual_change < params.tol) {
      report.converged = true;
      break;
    }
  }

  // The primal-dual iterates converge slowly when the rescaled beta is small,
  // so the best iterate is refined by a few projected Newton steps.
  if (params.polish_iter > 0) {
    Vector x = best.values / unscale;
    double pg = 0.0;
    report.polish_iterations =
        newton_polish(x, zs, beta, T, params.polish_iter, params.polish_tol, pg);
    report.projected_gradient_norm = pg;
    candidate.values = unscale * x;
    const double objective = graph_objective_edges(candidate, z, params.alpha, params.beta);
    if (objective <= best_objective) {
      best_objective = objective;
      best.values = candidate.values;
      report.objective_trace.back() = best_objective;
    }
    if (pg <= params.polish_tol) report.converged = true;
  }

  return GraphSolution{matrixform(best), std::move(report)};
}

AdjacencyMatrix default_initial_graph(const PairwiseDistanceMatrix& Z) {
  const Index T = Z.size();
  if (T < 2) throw InvalidInput("initial graph needs at least two nodes");
  const double mean = vectorform(Z).values.mean();
  Matrix A = Matrix::Zero(T, T);
  for (Index i = 0; i < T; ++i) {
    for (Index j = i + 1; j < T; ++j) {
      // Floored so that extreme distances never underflow to a missing edge.
      const double a =
          mean > 0.0 ? std::max(std::exp(-Z(i, j) / mean), 1e-300) : 1.0;
      A(i, j) = a;
      A(j, i) = a;
    }
  }
  return AdjacencyMatrix(std::move(A));
}

}  // namespace gamtl
