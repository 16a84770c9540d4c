#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gamtl/gamtl.hpp"
#include "gamtl/rbf_gamtl.hpp"

namespace gamtl {

struct RmseResult {
  std::vector<int> task_ids;
  Vector per_task;
  // sqrt of the mean squared error pooled over every test sample.
  double pooled = 0.0;
  // Plain mean of the per-task values.
  double mean_of_tasks = 0.0;
};

// predictions[t] holds the predictions for tasks[t].y.
RmseResult rmse_from_predictions(const std::vector<Vector>& predictions,
                                 const std::vector<TaskDataset>& tasks);

// Test tasks are matched to model heads by task id.
RmseResult rmse(const GamtlModel& model, const std::vector<TaskDataset>& test);

// Same for a bare weight matrix whose column t belongs to task_ids[t].
RmseResult rmse(const WeightMatrix& W, const std::vector<int>& task_ids,
                const std::vector<TaskDataset>& test);

struct TrainTest {
  std::vector<TaskDataset> train;
  std::vector<TaskDataset> test;
};

enum class MethodKind { kGamtl, kRbfGamtl, kRidge };

const char* to_string(MethodKind kind);
MethodKind method_kind_from_string(const std::string& name);

struct BenchmarkMethod {
  std::string label;
  MethodKind kind = MethodKind::kGamtl;
  GamtlConfig config;
  RbfOptions rbf;
};

struct BenchmarkRun {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  RmseResult rmse;
  // Empty for the ridge baseline.
  std::vector<double> objective_sequence;
  std::string status;
  std::vector<std::string> warnings;
  // Kept only when requested.
  std::optional<GamtlModel> model;
};

struct BenchmarkReport {
  std::string method;
  MethodKind kind = MethodKind::kGamtl;
  GamtlConfig config;
  std::vector<std::uint64_t> seeds;
  std::vector<BenchmarkRun> runs;
  // Over successful runs; std is the sample deviation (0 for one run).
  std::vector<double> rmse_values;
  double mean = 0.0;
  double std = 0.0;
  double mean_of_task_rmse = 0.0;
  // Mean over successful runs of each task's RMSE.
  std::vector<int> task_ids;
  Vector per_task_mean;
  int failures = 0;
  bool flagged = false;
};

using DatasetFactory = std::function<TrainTest(std::uint64_t seed)>;

// Runs method on n_runs replicates with seeds base_seed, base_seed + 1, ...
// The seed feeds both the generator and config.seed. A failing run is
// recorded and excluded from the aggregate, and the report is flagged.
BenchmarkReport benchmark(const DatasetFactory& factory,
                          const BenchmarkMethod& method, int n_runs,
                          std::uint64_t base_seed, bool keep_models = false);

enum class GraphFormat { kEdgeCsv, kDot, kJson };

GraphFormat graph_format_from_string(const std::string& name);

// 1e-4 times the largest edge weight.
double default_export_threshold(const AdjacencyMatrix& A);

// Nodes with no edge above the threshold, plus weakly connected nodes whose
// degree is below degree_ratio times the median degree.
std::vector<int> outlier_candidates(const AdjacencyMatrix& A, double threshold,
                                    double degree_ratio = 0.1);

// Nodes with no edge above the threshold.
std::vector<int> isolated_nodes(const AdjacencyMatrix& A, double threshold);

// Edges with weight > threshold, i < j, in row-major order.
std::string export_graph(const AdjacencyMatrix& A, double threshold,
                         GraphFormat format, double degree_ratio = 0.1);

// Rebuilds the thresholded adjacency from an edge-csv document; nodes = 0
// infers the size from the largest id.
AdjacencyMatrix import_edge_csv(const std::string& text, Index nodes = 0);

// Keeps entries above the threshold, zeroes the rest.
AdjacencyMatrix threshold_graph(const AdjacencyMatrix& A, double threshold);

// Fraction of the k heaviest edges that join two tasks of the same group,
// with k the number of intra-group pairs. Ties go to the lexicographically
// smaller (i, j). Groups must partition 0..T-1.
double graph_recovery_score(const AdjacencyMatrix& A,
                            const std::vector<std::vector<int>>& groups);

// Fraction of nodes whose `top` heaviest incident edges include every
// listed neighbor (ties to the smaller index).
double neighbor_recovery_fraction(const AdjacencyMatrix& A,
                                  const std::vector<std::vector<int>>& neighbors,
                                  int top);

}  // namespace gamtl
