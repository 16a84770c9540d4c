#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gamtl/config_schema.hpp"
#include "gamtl/model_io.hpp"
#include "gamtl/presets.hpp"
#include "oracles.hpp"

using namespace gamtl;

namespace {

GamtlModel small_model(bool with_map) {
  std::mt19937_64 rng(111);
  std::vector<TaskDataset> tasks;
  for (int t = 0; t < 3; ++t) {
    TaskDataset task{t * 10, oracle::random_matrix(rng, 2, 12), Vector()};
    task.y = oracle::random_matrix(rng, 12, 1).col(0);
    tasks.push_back(task);
  }
  GamtlConfig c;
  c.gamma = 0.3;
  c.seed = 77;
  if (!with_map) return fit(tasks, c);
  RbfOptions opts;
  opts.centers = 4;
  return fit_rbf(tasks, opts, c);
}

}  // namespace

TEST_CASE("run config schema") {
  const RunConfig defaults = parse_run_config(default_run_config());
  CHECK(defaults.data.generator == "syn1");
  CHECK(run_config_to_json(defaults) == default_run_config());

  SUBCASE("unknown keys are rejected with their path") {
    Json doc = default_run_config();
    doc["model"]["gama"] = 1.0;
    CHECK_THROWS_WITH_AS(parse_run_config(doc), doctest::Contains("model.gama"), ConfigError);
  }

  SUBCASE("type errors carry the path") {
    Json doc = default_run_config();
    doc["data"]["n_train"] = "many";
    CHECK_THROWS_WITH_AS(parse_run_config(doc), doctest::Contains("data.n_train"), ConfigError);
  }

  SUBCASE("value errors surface before any work") {
    Json doc = default_run_config();
    doc["model"]["alpha"] = -1.0;
    CHECK_THROWS_AS(parse_run_config(doc), InvalidInput);
  }

  SUBCASE("overrides") {
    Json doc = default_run_config();
    apply_override(doc, "model.alpha=2.5");
    apply_override(doc, "data.generator=syn2");
    apply_override(doc, "bench.methods=[\"ridge\"]");
    const RunConfig rc = parse_run_config(doc);
    CHECK(rc.model.graph_params.alpha == 2.5);
    CHECK(rc.data.generator == "syn2");
    CHECK(rc.bench.methods == std::vector<std::string>{"ridge"});
    CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), ConfigError);
    apply_override(doc, "model.nope=1");
    CHECK_THROWS_WITH_AS(parse_run_config(doc), doctest::Contains("model.nope"), ConfigError);
  }

  SUBCASE("model section round trip") {
    GamtlConfig c;
    c.gamma = 0.123;
    c.graph_params.beta = 4.5;
    c.max_outer_iter = 17;
    const GamtlConfig back = model_config_from_json(model_config_to_json(c));
    CHECK(model_config_to_json(back) == model_config_to_json(c));
  }
}

TEST_CASE("shipped config files mirror the presets") {
  const std::filesystem::path dir = GAMTL_SOURCE_DIR "/configs";
  for (const std::string name : {"syn1", "syn2", "wiener"}) {
    CAPTURE(name);
    const Json file = read_json_file((dir / (name + ".json")).string());
    Json merged = default_run_config();
    merged.merge_patch(file);
    const RunConfig from_file = parse_run_config(merged);
    const RunConfig from_preset = parse_run_config(preset_run_config(name));
    CHECK(run_config_to_json(from_file)["model"] == run_config_to_json(from_preset)["model"]);
    CHECK(run_config_to_json(from_file)["rbf"] == run_config_to_json(from_preset)["rbf"]);
    CHECK(from_file.data.generator == name);
  }
}

TEST_CASE("model serialization") {
  for (bool with_map : {false, true}) {
    CAPTURE(with_map);
    const GamtlModel model = small_model(with_map);
    const std::string text = dump_json(model_to_json(model));
    const GamtlModel back = model_from_json(Json::parse(text));
    CHECK(back.W == model.W);
    CHECK(back.A.weights() == model.A.weights());
    CHECK(back.task_ids == model.task_ids);
    CHECK(back.trace.objective_sequence() == model.trace.objective_sequence());
    CHECK(back.feature_map.has_value() == with_map);
    if (with_map) {
      CHECK(back.feature_map->centers == model.feature_map->centers);
      CHECK(back.feature_map->widths == model.feature_map->widths);
    }
    CHECK(dump_json(model_to_json(back)) == text);
  }

  Json doc = model_to_json(small_model(false));
  doc["A"].erase(0);
  CHECK_THROWS_AS(model_from_json(doc), InvalidInput);
  CHECK_THROWS_AS(model_from_json(Json{{"format", "other"}}), InvalidInput);
  CHECK_THROWS_AS(read_json_file("/nonexistent/model.json"), IoError);
}
