#pragma once

#include <vector>

#include "gamtl/gamtl.hpp"

namespace gamtl {

struct RbfOptions {
  // Number of centers; 0 picks min(50, floor(sqrt(pooled N))).
  Index centers = 0;
  double width_factor = 1.0;
  // Width used when there is a single center; 0 picks the RMS distance of
  // the pooled samples to that center.
  double single_center_width = 0.0;
  bool bias = true;
};

void validate(const RbfOptions& options);

Index default_center_count(Index pooled_samples);

// Columns of all tasks' X side by side, in task order.
Matrix pool_inputs(const std::vector<TaskDataset>& tasks);

// Centers and widths from the pooled inputs of all tasks.
RbfFeatureMap fit_feature_map(const std::vector<TaskDataset>& tasks,
                              const RbfOptions& options, std::uint64_t seed);

std::vector<TaskDataset> lift_tasks(const RbfFeatureMap& map,
                                    const std::vector<TaskDataset>& tasks);

// Multi-head RBF network: shared first layer from k-means, task heads and
// graph from the alternating solver on the lifted data.
GamtlModel fit_rbf(const std::vector<TaskDataset>& tasks,
                   const RbfOptions& options, const GamtlConfig& config);

}  // namespace gamtl
