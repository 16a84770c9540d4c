#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gamtl/weight_solver.hpp"

namespace gamtl {

struct SynSpec {
  std::uint64_t seed = 0;
  Index n_train = 20;
  Index n_test = 80;
  double noise_std = 1.0;
};

void validate(const SynSpec& spec);

struct SyntheticDataset {
  std::vector<TaskDataset> train;
  std::vector<TaskDataset> test;
  WeightMatrix true_W;
  // Ground-truth task groups (0-based ids); outliers are singletons.
  std::vector<std::vector<int>> groups;
};

// Two groups (tasks 0-11 around w_g1 ~ N(1, I), tasks 12-17 around
// w_g2 ~ N(-1, I), each member offset by 0.1 * U[0,1]^30) and two outliers
// (task 18 ~ N(0, I), task 19 ~ N(0, 10 I)). d = 30, inputs shared by all
// tasks within a split, y = w^T x + N(0, noise_std^2).
SyntheticDataset gen_syn1(const SynSpec& spec);

// Ring: w_0 ~ N(0, I_30); task t rotates the first two coordinates of w_0
// by 2 pi t / 19, so task 19 coincides with task 0.
SyntheticDataset gen_syn2(const SynSpec& spec);

// For each Syn 2 task, the tasks whose rotation angle is one step away.
std::vector<std::vector<int>> syn2_ring_neighbors();

struct WienerNetworkSpec {
  std::uint64_t seed = 0;
  Index n_agents = 10;
  Index samples_per_agent = 1000;
  Index burn_in = 200;
  std::vector<std::vector<int>> clusters{{0, 1, 2}, {3, 4, 5}, {6, 7}, {8, 9}};
  std::array<double, 2> base_coeff{0.5, -0.4};
  std::vector<std::array<double, 2>> cluster_offsets{
      {0.2, -0.1}, {0.2, 0.1}, {-0.3, 0.1}, {0.0, 0.1}};
  std::array<double, 2> input_variance_range{0.005, 0.015};
  std::array<double, 2> noise_variance_range{0.0005, 0.0015};
  double rho = 0.5;
  // Undirected edges (0-based). Empty selects default_wiener_topology().
  std::vector<std::pair<int, int>> topology;
};

void validate(const WienerNetworkSpec& spec);

// Complete graphs inside each cluster plus the bridges 2-3, 5-6, 7-8, 9-0.
std::vector<std::pair<int, int>> default_wiener_topology();

struct WienerNetworkData {
  // Features (x(1), x(2), d[i-1], d[i-2]), target d[i].
  std::vector<TaskDataset> tasks;
  WeightMatrix cluster_W;  // 2 x n_agents, w0 + dw of each agent's cluster
  Matrix mixing;           // Metropolis weights over the topology
  WeightMatrix W_star;     // cluster_W * mixing
  Vector input_variance;
  Vector noise_variance;
};

// Static output nonlinearity of the Wiener system.
double wiener_nonlinearity(double y);

// A[k][l] = 1 / max(n_k, n_l) for neighbors, where n_k counts k itself;
// the diagonal takes the remainder of each row.
Matrix metropolis_weights(Index nodes, const std::vector<std::pair<int, int>>& edges);

WienerNetworkData gen_wiener_network(const WienerNetworkSpec& spec);

struct CsvSchema {
  std::string task_column;
  std::string target_column;
  // Empty: every other column is a feature.
  std::vector<std::string> feature_columns;
  bool standardize = false;
  bool standardize_target = false;
};

// One task per distinct value of the task column, in order of first
// appearance; task ids are the integer values of that column.
std::vector<TaskDataset> load_csv_tasks(const std::string& path,
                                        const CsvSchema& schema);
std::vector<TaskDataset> parse_csv_tasks(const std::string& text,
                                         const CsvSchema& schema);

// Header `task,y,x0,...,x{d-1}`, 17 significant digits.
std::string format_csv_tasks(const std::vector<TaskDataset>& tasks);
void write_csv_tasks(const std::string& path, const std::vector<TaskDataset>& tasks);

// Reads the format written by write_csv_tasks.
std::vector<TaskDataset> read_csv_tasks(const std::string& path);

// Per-feature z-scores pooled over all samples of the fitting tasks.
struct Standardizer {
  Vector feature_mean;
  Vector feature_scale;
  double target_mean = 0.0;
  double target_scale = 1.0;
  bool targets = false;

  static Standardizer fit(const std::vector<TaskDataset>& tasks,
                          bool standardize_target);
  std::vector<TaskDataset> apply(const std::vector<TaskDataset>& tasks) const;
};

struct TrainTestSplit {
  std::vector<TaskDataset> train;
  std::vector<TaskDataset> test;
};

// Per-task shuffle; the first ceil(ratio * N_t) samples (at most N_t - 1)
// go to training.
TrainTestSplit train_test_split(const std::vector<TaskDataset>& tasks,
                                double ratio, std::uint64_t seed);

}  // namespace gamtl
