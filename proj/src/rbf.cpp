#include "gamtl/rbf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "gamtl/errors.hpp"
#include "gamtl/random.hpp"
#include "gamtl/rbf_gamtl.hpp"

namespace gamtl {

void validate(const RbfFeatureMap& map) {
  if (map.center_count() < 1) throw InvalidInput("feature map needs a center");
  if (map.widths.size() != map.center_count()) {
    throw InvalidInput("feature map needs one width per center");
  }
  if (!map.centers.allFinite()) throw InvalidInput("centers must be finite");
  if (!(map.widths.array() > 0.0).all() || !map.widths.allFinite()) {
    throw InvalidInput("widths must be positive and finite");
  }
}

namespace {

Index nearest_center(const Matrix& centers, const Eigen::Ref<const Vector>& x,
                     double* distance = nullptr) {
  Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index p = 0; p < centers.cols(); ++p) {
    const double dist = (centers.col(p) - x).squaredNorm();
    if (dist < best_d) {
      best_d = dist;
      best = p;
    }
  }
  if (distance) *distance = best_d;
  return best;
}

}  // namespace

Matrix kmeans_centers(const Matrix& samples, Index P, std::uint64_t seed,
                      int max_iter) {
  const Index N = samples.cols();
  if (P < 1) throw InvalidInput("need at least one center");
  if (P > N) {
    throw InvalidInput("cannot place " + std::to_string(P) + " centers on " +
                       std::to_string(N) + " samples");
  }
  if (!samples.allFinite()) throw InvalidInput("samples must be finite");

  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // k-means++ seeding.
  Matrix centers(samples.rows(), P);
  std::uniform_int_distribution<Index> first(0, N - 1);
  centers.col(0) = samples.col(first(rng));
  Vector d2(N);
  for (Index i = 0; i < N; ++i) d2[i] = (samples.col(i) - centers.col(0)).squaredNorm();
  for (Index p = 1; p < P; ++p) {
    const double total = d2.sum();
    Index pick = 0;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double acc = 0.0;
      pick = N - 1;
      for (Index i = 0; i < N; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);
    }
    centers.col(p) = samples.col(pick);
    for (Index i = 0; i < N; ++i) {
      d2[i] = std::min(d2[i], (samples.col(i) - centers.col(p)).squaredNorm());
    }
  }

  // Lloyd iterations.
  std::vector<Index> assignment(static_cast<std::size_t>(N), -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (Index i = 0; i < N; ++i) {
      const Index c = nearest_center(centers, samples.col(i));
      if (assignment[static_cast<std::size_t>(i)] != c) {
        assignment[static_cast<std::size_t>(i)] = c;
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sums = Matrix::Zero(samples.rows(), P);
    Vector counts = Vector::Zero(P);
    for (Index i = 0; i < N; ++i) {
      const Index c = assignment[static_cast<std::size_t>(i)];
      sums.col(c) += samples.col(i);
      counts[c] += 1.0;
    }
    for (Index p = 0; p < P; ++p) {
      // Empty clusters keep their previous center.
      if (counts[p] > 0.0) centers.col(p) = sums.col(p) / counts[p];
    }
  }
  return centers;
}

WidthResult optimal_widths(const Matrix& centers, const Matrix& samples,
                           double width_factor) {
  const Index P = centers.cols();
  if (P < 2) {
    throw InvalidInput("nearest-center widths need at least two centers; "
                       "give an explicit width for a single center");
  }
  if (!(width_factor > 0.0) || !std::isfinite(width_factor)) {
    throw InvalidInput("width_factor must be positive");
  }
  Vector nearest(P);
  for (Index p = 0; p < P; ++p) {
    double best = std::numeric_limits<double>::infinity();
    for (Index q = 0; q < P; ++q) {
      if (q != p) best = std::min(best, (centers.col(p) - centers.col(q)).norm());
    }
    nearest[p] = best;
  }
  WidthResult result;
  double nonzero_sum = 0.0;
  Index nonzero_count = 0;
  for (Index p = 0; p < P; ++p) {
    if (nearest[p] > 0.0) {
      nonzero_sum += nearest[p];
      ++nonzero_count;
    }
  }
  double fallback = 1.0;
  if (nonzero_count > 0) {
    fallback = nonzero_sum / static_cast<double>(nonzero_count);
  } else if (samples.cols() > 0) {
    // All centers coincide: use the RMS spread of the samples around them.
    const double spread = std::sqrt(
        (samples.colwise() - centers.col(0)).colwise().squaredNorm().mean());
    if (spread > 0.0) fallback = spread;
  }
  for (Index p = 0; p < P; ++p) {
    if (!(nearest[p] > 0.0)) {
      nearest[p] = fallback;
      result.duplicate_fallback = true;
    }
  }
  result.widths = width_factor * nearest;
  return result;
}

Vector transform(const RbfFeatureMap& map, const Vector& x) {
  if (x.size() != map.input_dim()) {
    throw InvalidInput("input dimension does not match the feature map");
  }
  Vector phi(map.center_count());
  for (Index p = 0; p < map.center_count(); ++p) {
    const double r2 = (x - map.centers.col(p)).squaredNorm();
    phi[p] = std::exp(-r2 / (2.0 * map.widths[p] * map.widths[p]));
  }
  return phi;
}

Matrix lift(const RbfFeatureMap& map, const Matrix& X) {
  if (X.rows() != map.input_dim()) {
    throw InvalidInput("input dimension does not match the feature map");
  }
  Matrix out(map.lifted_dim(), X.cols());
  for (Index i = 0; i < X.cols(); ++i) {
    out.col(i).head(map.center_count()) = transform(map, X.col(i));
    if (map.bias) out(map.center_count(), i) = 1.0;
  }
  return out;
}

// RBF-GAMTL driver.

void validate(const RbfOptions& options) {
  if (options.centers < 0) throw InvalidInput("center count must be nonnegative");
  if (!(options.width_factor > 0.0) || !std::isfinite(options.width_factor)) {
    throw InvalidInput("width_factor must be positive");
  }
  if (!(options.single_center_width >= 0.0)) {
    throw InvalidInput("single_center_width must be nonnegative");
  }
}

Index default_center_count(Index pooled_samples) {
  const auto root = static_cast<Index>(std::floor(std::sqrt(static_cast<double>(pooled_samples))));
  return std::max<Index>(1, std::min<Index>(50, root));
}

Matrix pool_inputs(const std::vector<TaskDataset>& tasks) {
  const Index d = validate_tasks(tasks);
  Index total = 0;
  for (const auto& task : tasks) total += task.X.cols();
  Matrix pooled(d, total);
  Index col = 0;
  for (const auto& task : tasks) {
    pooled.middleCols(col, task.X.cols()) = task.X;
    col += task.X.cols();
  }
  return pooled;
}

RbfFeatureMap fit_feature_map(const std::vector<TaskDataset>& tasks,
                              const RbfOptions& options, std::uint64_t seed) {
  validate(options);
  const Matrix pooled = pool_inputs(tasks);
  const Index P = options.centers > 0 ? options.centers
                                      : default_center_count(pooled.cols());
  RbfFeatureMap map;
  map.bias = options.bias;
  map.centers = kmeans_centers(pooled, P, derive_seed(seed, streams::kKMeans));
  if (P == 1) {
    double width = options.single_center_width;
    if (width == 0.0) {
      width = std::sqrt((pooled.colwise() - map.centers.col(0)).colwise()
                            .squaredNorm().mean());
      if (!(width > 0.0)) width = 1.0;
    }
    map.widths = Vector::Constant(1, width);
  } else {
    map.widths = optimal_widths(map.centers, pooled, options.width_factor).widths;
  }
  validate(map);
  return map;
}

std::vector<TaskDataset> lift_tasks(const RbfFeatureMap& map,
                                    const std::vector<TaskDataset>& tasks) {
  std::vector<TaskDataset> out;
  out.reserve(tasks.size());
  for (const auto& task : tasks) {
    out.push_back(TaskDataset{task.task_id, lift(map, task.X), task.y});
  }
  return out;
}

GamtlModel fit_rbf(const std::vector<TaskDataset>& tasks,
                   const RbfOptions& options, const GamtlConfig& config) {
  validate(config);
  if (tasks.size() < 2) {
    throw InvalidInput("multi-task fitting needs at least two tasks");
  }
  RbfFeatureMap map = fit_feature_map(tasks, options, config.seed);
  GamtlModel model = fit(lift_tasks(map, tasks), config);
  model.feature_map = std::move(map);
  return model;
}

}  // namespace gamtl
