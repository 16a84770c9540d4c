#include "gamtl/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

#include "gamtl/errors.hpp"

namespace gamtl {

RmseResult rmse_from_predictions(const std::vector<Vector>& predictions,
                                 const std::vector<TaskDataset>& tasks) {
  if (predictions.size() != tasks.size()) {
    throw InvalidInput("one prediction vector per task is required");
  }
  RmseResult out;
  out.per_task.resize(static_cast<Index>(tasks.size()));
  double sse = 0.0;
  Index count = 0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto& task = tasks[t];
    if (predictions[t].size() != task.y.size()) {
      throw InvalidInput("prediction count differs from sample count for task " +
                         std::to_string(task.task_id));
    }
    if (task.y.size() == 0) {
      throw InvalidInput("task " + std::to_string(task.task_id) + " has no test samples");
    }
    const double task_sse = (predictions[t] - task.y).squaredNorm();
    out.task_ids.push_back(task.task_id);
    out.per_task[static_cast<Index>(t)] =
        std::sqrt(task_sse / static_cast<double>(task.y.size()));
    sse += task_sse;
    count += task.y.size();
  }
  if (count == 0) throw InvalidInput("no test samples");
  out.pooled = std::sqrt(sse / static_cast<double>(count));
  out.mean_of_tasks = out.per_task.mean();
  return out;
}

RmseResult rmse(const GamtlModel& model, const std::vector<TaskDataset>& test) {
  std::vector<Vector> predictions;
  predictions.reserve(test.size());
  for (const auto& task : test) predictions.push_back(predict_batch(model, task.task_id, task.X));
  return rmse_from_predictions(predictions, test);
}

RmseResult rmse(const WeightMatrix& W, const std::vector<int>& task_ids,
                const std::vector<TaskDataset>& test) {
  if (static_cast<Index>(task_ids.size()) != W.cols()) {
    throw InvalidInput("one task id per weight column is required");
  }
  std::vector<Vector> predictions;
  for (const auto& task : test) {
    const auto it = std::find(task_ids.begin(), task_ids.end(), task.task_id);
    if (it == task_ids.end()) {
      throw InvalidInput("unknown task id " + std::to_string(task.task_id));
    }
    if (task.X.rows() != W.rows()) throw InvalidInput("test dimension differs from the model");
    predictions.push_back(task.X.transpose() * W.col(it - task_ids.begin()));
  }
  return rmse_from_predictions(predictions, test);
}

const char* to_string(MethodKind kind) {
  switch (kind) {
    case MethodKind::kGamtl: return "gamtl";
    case MethodKind::kRbfGamtl: return "rbf-gamtl";
    case MethodKind::kRidge: return "ridge";
  }
  return "unknown";
}

MethodKind method_kind_from_string(const std::string& name) {
  if (name == "gamtl") return MethodKind::kGamtl;
  if (name == "rbf-gamtl") return MethodKind::kRbfGamtl;
  if (name == "ridge") return MethodKind::kRidge;
  throw InvalidInput("unknown method '" + name + "' (expected gamtl, rbf-gamtl or ridge)");
}

namespace {

BenchmarkRun run_once(const DatasetFactory& factory, const BenchmarkMethod& method,
                      std::uint64_t seed, bool keep_model) {
  BenchmarkRun run;
  run.seed = seed;
  try {
    const TrainTest data = factory(seed);
    GamtlConfig config = method.config;
    config.seed = seed;
    if (method.kind == MethodKind::kRidge) {
      const WeightMatrix W = ridge_independent(data.train, config.ridge_lambda);
      std::vector<int> ids;
      for (const auto& task : data.train) ids.push_back(task.task_id);
      run.rmse = rmse(W, ids, data.test);
      run.status = "closed_form";
    } else {
      GamtlModel model = method.kind == MethodKind::kGamtl
                             ? fit(data.train, config)
                             : fit_rbf(data.train, method.rbf, config);
      run.rmse = rmse(model, data.test);
      run.objective_sequence = model.trace.objective_sequence();
      run.status = to_string(model.status);
      run.warnings = model.warnings;
      if (model.status == FitStatus::kNumericalFailure) {
        throw std::runtime_error("numerical failure during fit");
      }
      if (keep_model) run.model = std::move(model);
    }
    if (!std::isfinite(run.rmse.pooled)) throw std::runtime_error("non-finite RMSE");
    run.ok = true;
  } catch (const std::exception& e) {
    run.ok = false;
    run.error = e.what();
  }
  return run;
}

}  // namespace

BenchmarkReport benchmark(const DatasetFactory& factory, const BenchmarkMethod& method,
                          int n_runs, std::uint64_t base_seed, bool keep_models) {
  if (n_runs < 1) throw InvalidInput("n_runs must be at least 1");
  if (!factory) throw InvalidInput("benchmark needs a dataset factory");
  validate(method.config);
  if (method.kind == MethodKind::kRbfGamtl) validate(method.rbf);

  BenchmarkReport report;
  report.method = method.label.empty() ? to_string(method.kind) : method.label;
  report.kind = method.kind;
  report.config = method.config;
  for (int r = 0; r < n_runs; ++r) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(r);
    report.seeds.push_back(seed);
    report.runs.push_back(run_once(factory, method, seed, keep_models));
  }

  std::vector<const RmseResult*> ok;
  for (const auto& run : report.runs) {
    if (run.ok) {
      ok.push_back(&run.rmse);
      report.rmse_values.push_back(run.rmse.pooled);
    } else {
      ++report.failures;
    }
  }
  report.flagged = report.failures > 0;
  if (ok.empty()) {
    report.mean = std::nan("");
    report.std = std::nan("");
    report.mean_of_task_rmse = std::nan("");
    return report;
  }
  const double n = static_cast<double>(ok.size());
  report.mean = std::accumulate(report.rmse_values.begin(), report.rmse_values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : report.rmse_values) ss += (v - report.mean) * (v - report.mean);
  report.std = ok.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;

  report.task_ids = ok.front()->task_ids;
  report.per_task_mean = Vector::Zero(static_cast<Index>(report.task_ids.size()));
  double task_mean_sum = 0.0;
  for (const RmseResult* r : ok) {
    if (r->task_ids == report.task_ids) report.per_task_mean += r->per_task;
    task_mean_sum += r->mean_of_tasks;
  }
  report.per_task_mean /= n;
  report.mean_of_task_rmse = task_mean_sum / n;
  return report;
}

GraphFormat graph_format_from_string(const std::string& name) {
  if (name == "edge-csv") return GraphFormat::kEdgeCsv;
  if (name == "dot") return GraphFormat::kDot;
  if (name == "json") return GraphFormat::kJson;
  throw InvalidInput("unknown graph format '" + name + "' (expected edge-csv, dot or json)");
}

double default_export_threshold(const AdjacencyMatrix& A) {
  return 1e-4 * (A.size() > 0 ? A.weights().maxCoeff() : 0.0);
}

namespace {

void check_threshold(double threshold) {
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
    throw InvalidInput("threshold must be finite and nonnegative");
  }
}

std::string format_weight(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<int> isolated_nodes(const AdjacencyMatrix& A, double threshold) {
  check_threshold(threshold);
  std::vector<int> out;
  for (Index i = 0; i < A.size(); ++i) {
    if (!(A.weights().row(i).array() > threshold).any()) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> outlier_candidates(const AdjacencyMatrix& A, double threshold,
                                    double degree_ratio) {
  if (!(degree_ratio >= 0.0)) throw InvalidInput("degree_ratio must be nonnegative");
  std::vector<int> isolated = isolated_nodes(A, threshold);
  std::set<int> out(isolated.begin(), isolated.end());
  const Vector degrees = A.degrees();
  if (degrees.size() > 0) {
    std::vector<double> sorted(degrees.data(), degrees.data() + degrees.size());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    for (Index i = 0; i < degrees.size(); ++i) {
      if (degrees[i] < degree_ratio * median) out.insert(static_cast<int>(i));
    }
  }
  return {out.begin(), out.end()};
}

std::string export_graph(const AdjacencyMatrix& A, double threshold, GraphFormat format,
                         double degree_ratio) {
  check_threshold(threshold);
  const Index n = A.size();
  const std::vector<int> isolated = isolated_nodes(A, threshold);
  const std::vector<int> outliers = outlier_candidates(A, threshold, degree_ratio);

  std::ostringstream out;
  switch (format) {
    case GraphFormat::kEdgeCsv: {
      out << "source,target,weight\n";
      for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
          if (A(i, j) > threshold) out << i << ',' << j << ',' << format_weight(A(i, j)) << '\n';
        }
      }
      break;
    }
    case GraphFormat::kDot: {
      out << "graph tasks {\n";
      for (int node : outliers) out << "  " << node << " [outlier=true];\n";
      for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
          if (A(i, j) > threshold) {
            out << "  " << i << " -- " << j << " [weight=" << format_weight(A(i, j)) << "];\n";
          }
        }
      }
      out << "}\n";
      break;
    }
    case GraphFormat::kJson: {
      nlohmann::json doc;
      doc["n"] = n;
      doc["edges"] = nlohmann::json::array();
      for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
          if (A(i, j) > threshold) doc["edges"].push_back({i, j, A(i, j)});
        }
      }
      doc["isolated"] = isolated;
      doc["outlier_candidates"] = outliers;
      doc["threshold"] = threshold;
      out << doc.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

AdjacencyMatrix import_edge_csv(const std::string& text, Index nodes) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("source,target,weight", 0) != 0) {
    throw InvalidInput("edge-csv must start with the header source,target,weight");
  }
  struct Edge {
    long long i, j;
    double w;
  };
  std::vector<Edge> edges;
  long long max_id = -1;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Edge e{};
    const char* p = line.data();
    const char* end = p + line.size();
    auto fail = [row]() {
      return InvalidInput("edge-csv row " + std::to_string(row) + " is malformed");
    };
    auto r1 = std::from_chars(p, end, e.i);
    if (r1.ec != std::errc() || r1.ptr == end || *r1.ptr != ',') throw fail();
    auto r2 = std::from_chars(r1.ptr + 1, end, e.j);
    if (r2.ec != std::errc() || r2.ptr == end || *r2.ptr != ',') throw fail();
    auto r3 = std::from_chars(r2.ptr + 1, end, e.w);
    if (r3.ec != std::errc() || r3.ptr != end) throw fail();
    if (e.i < 0 || e.j < 0 || e.i == e.j || !(e.w >= 0.0) || !std::isfinite(e.w)) throw fail();
    max_id = std::max({max_id, e.i, e.j});
    edges.push_back(e);
  }
  const Index n = nodes > 0 ? nodes : static_cast<Index>(max_id + 1);
  if (max_id >= n) throw InvalidInput("edge-csv node id exceeds the node count");
  Matrix W = Matrix::Zero(n, n);
  for (const auto& e : edges) {
    W(e.i, e.j) = e.w;
    W(e.j, e.i) = e.w;
  }
  return AdjacencyMatrix(std::move(W));
}

AdjacencyMatrix threshold_graph(const AdjacencyMatrix& A, double threshold) {
  check_threshold(threshold);
  Matrix W = (A.weights().array() > threshold).select(A.weights(), 0.0);
  return AdjacencyMatrix(std::move(W));
}

namespace {

// Edges sorted by weight descending, ties in row-major (i, j) order.
std::vector<std::pair<Index, Index>> ranked_edges(const AdjacencyMatrix& A) {
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 0; i < A.size(); ++i) {
    for (Index j = i + 1; j < A.size(); ++j) edges.emplace_back(i, j);
  }
  std::stable_sort(edges.begin(), edges.end(), [&A](const auto& a, const auto& b) {
    return A(a.first, a.second) > A(b.first, b.second);
  });
  return edges;
}

}  // namespace

double graph_recovery_score(const AdjacencyMatrix& A,
                            const std::vector<std::vector<int>>& groups) {
  const Index n = A.size();
  std::vector<int> group_of(static_cast<std::size_t>(n), -1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw InvalidInput("groups must be nonempty");
    for (int t : groups[g]) {
      if (t < 0 || t >= n) throw InvalidInput("group member " + std::to_string(t) + " out of range");
      if (group_of[static_cast<std::size_t>(t)] != -1) {
        throw InvalidInput("task " + std::to_string(t) + " appears in two groups");
      }
      group_of[static_cast<std::size_t>(t)] = static_cast<int>(g);
    }
  }
  for (Index t = 0; t < n; ++t) {
    if (group_of[static_cast<std::size_t>(t)] == -1) {
      throw InvalidInput("task " + std::to_string(t) + " is in no group");
    }
  }
  std::size_t k = 0;
  for (const auto& g : groups) k += g.size() * (g.size() - 1) / 2;
  if (k == 0) return 1.0;

  const auto edges = ranked_edges(A);
  std::size_t hits = 0;
  for (std::size_t e = 0; e < k; ++e) {
    if (group_of[static_cast<std::size_t>(edges[e].first)] ==
        group_of[static_cast<std::size_t>(edges[e].second)]) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

double neighbor_recovery_fraction(const AdjacencyMatrix& A,
                                  const std::vector<std::vector<int>>& neighbors, int top) {
  const Index n = A.size();
  if (static_cast<Index>(neighbors.size()) != n) {
    throw InvalidInput("one neighbor list per node is required");
  }
  if (top < 1) throw InvalidInput("top must be at least 1");
  int good = 0;
  for (Index i = 0; i < n; ++i) {
    std::vector<Index> others;
    for (Index j = 0; j < n; ++j) {
      if (j != i) others.push_back(j);
    }
    std::stable_sort(others.begin(), others.end(),
                     [&A, i](Index a, Index b) { return A(i, a) > A(i, b); });
    others.resize(std::min<std::size_t>(others.size(), static_cast<std::size_t>(top)));
    bool all = true;
    for (int nb : neighbors[static_cast<std::size_t>(i)]) {
      if (nb < 0 || nb >= n || nb == i) throw InvalidInput("neighbor id out of range");
      all = all && std::find(others.begin(), others.end(), nb) != others.end();
    }
    if (all) ++good;
  }
  return static_cast<double>(good) / static_cast<double>(n);
}

}  // namespace gamtl
