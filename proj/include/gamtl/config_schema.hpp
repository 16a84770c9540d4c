#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "gamtl/data.hpp"
#include "gamtl/errors.hpp"
#include "gamtl/eval.hpp"
#include "gamtl/gamtl.hpp"
#include "gamtl/rbf_gamtl.hpp"

namespace gamtl {

using Json = nlohmann::json;

// Schema or value error; the message starts with the offending field path.
class ConfigError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

struct DataSection {
  // syn1, syn2, wiener, or csv (files named by train/test).
  std::string generator = "syn1";
  std::string train;
  std::string test;
  Index n_train = 20;
  Index n_test = 80;
  double noise_std = 1.0;
  // Used to split generated Wiener streams and single-file CSV data.
  double split_ratio = 0.5;
  CsvSchema csv{"task", "y", {}, false, false};
  WienerNetworkSpec wiener;
};

struct RbfSection {
  bool enabled = false;
  RbfOptions options;
};

struct BenchSection {
  int runs = 10;
  std::vector<std::string> methods{"gamtl", "ridge"};
};

struct ExportSection {
  std::string format = "json";
  // Negative selects 1e-4 times the largest edge weight.
  double threshold = -1.0;
  double degree_ratio = 0.1;
};

struct RunConfig {
  std::uint64_t seed = 0;
  DataSection data;
  GamtlConfig model;
  RbfSection rbf;
  BenchSection bench;
  ExportSection export_graph;
};

// Every key with its default value.
Json default_run_config();

// Rejects unknown keys and wrong types, then checks values. Missing keys
// take their defaults.
RunConfig parse_run_config(const Json& doc);

// Normalized echo of a parsed configuration.
Json run_config_to_json(const RunConfig& config);

// `path.to.key=value`; the value is read as JSON when it parses, otherwise
// as a string. Intermediate objects are created as needed.
void apply_override(Json& doc, const std::string& assignment);

// The "model" section alone.
Json model_config_to_json(const GamtlConfig& config);
GamtlConfig model_config_from_json(const Json& section, const std::string& path = "model");

// Builds one train/test replicate for the configured data source. For the
// synthetic generators `truth`, when given, receives the true weights and
// groups.
TrainTest generate_dataset(const RunConfig& rc, std::uint64_t seed, Json* truth = nullptr);

}  // namespace gamtl
