#pragma once

#include <cstdint>

#include "gamtl/graph_core.hpp"

namespace gamtl {

// Shared Gaussian RBF lift phi_p(x) = exp(-||x - c_p||^2 / (2 sigma_p^2)).
// When `bias` is set, the lifted vector gets a trailing constant 1.
struct RbfFeatureMap {
  Matrix centers;  // input_dim x P
  Vector widths;   // P
  bool bias = true;

  Index input_dim() const { return centers.rows(); }
  Index center_count() const { return centers.cols(); }
  Index lifted_dim() const { return center_count() + (bias ? 1 : 0); }
};

void validate(const RbfFeatureMap& map);

// k-means++ seeding followed by Lloyd iterations (at most `max_iter`, stops
// when assignments no longer change). `samples` is input_dim x N.
Matrix kmeans_centers(const Matrix& samples, Index P, std::uint64_t seed,
                      int max_iter = 300);

struct WidthResult {
  Vector widths;
  // True when some centers coincided and the fallback width was used.
  bool duplicate_fallback = false;
};

// sigma_p = width_factor * distance from c_p to its nearest other center.
// Coinciding centers get width_factor * (mean nonzero nearest distance).
WidthResult optimal_widths(const Matrix& centers, const Matrix& samples,
                           double width_factor);

// The P activations (no bias entry).
Vector transform(const RbfFeatureMap& map, const Vector& x);

// Lifted features for a batch: lifted_dim x N, bias row last.
Matrix lift(const RbfFeatureMap& map, const Matrix& X);

}  // namespace gamtl
