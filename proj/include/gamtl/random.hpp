#pragma once

#include <cstdint>
#include <random>

namespace gamtl {

using Rng = std::mt19937_64;

// Derives the seed of the `stream`-th independent random stream from a base
// seed (splitmix64 finalizer over base + golden-ratio * (stream + 1)).
// Every component that needs randomness takes one stream number, so adding
// draws to one component never shifts the draws of another.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream numbers used across the library.
namespace streams {
inline constexpr std::uint64_t kData = 1;
inline constexpr std::uint64_t kSplit = 2;
inline constexpr std::uint64_t kKMeans = 3;
inline constexpr std::uint64_t kFolds = 4;
}  // namespace streams

}  // namespace gamtl
