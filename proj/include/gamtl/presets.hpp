#pragma once

#include <string>

#include "gamtl/config_schema.hpp"

namespace gamtl {

// Hyperparameters picked by 5-fold cross validation over the default grid,
// averaged over development seeds 1000 and up (disjoint from the benchmark
// seeds 0-9). The configs/ directory mirrors these values.
GamtlConfig syn1_preset();
GamtlConfig syn2_preset();
GamtlConfig wiener_preset();
RbfOptions wiener_rbf_preset();

// Run configuration for `bench` on a named generator (syn1, syn2, wiener).
Json preset_run_config(const std::string& generator);

}  // namespace gamtl
