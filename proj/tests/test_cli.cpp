#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gamtl/cli.hpp"
#include "gamtl/data.hpp"
#include "gamtl/model_io.hpp"

using namespace gamtl;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

}  // namespace

TEST_CASE("synth writes files and is deterministic") {
  TempDir dir("gamtl_cli_synth");
  const auto r = run({"synth", "syn1", "--seed", "7", "--out", dir / "a"});
  REQUIRE(r.code == kExitOk);
  CHECK(fs::exists(dir / "a/train.csv"));
  CHECK(fs::exists(dir / "a/test.csv"));
  const Json manifest = read_json_file(dir / "a/manifest.json");
  CHECK(manifest["tasks"] == 20);
  CHECK(manifest["d"] == 30);
  CHECK(manifest["seed"] == 7);

  REQUIRE(run({"synth", "syn1", "--seed", "7", "--out", dir / "b"}).code == kExitOk);
  CHECK(slurp(dir / "a/train.csv") == slurp(dir / "b/train.csv"));
  CHECK(slurp(dir / "a/test.csv") == slurp(dir / "b/test.csv"));

  const auto bad = run({"synth", "syn1", "--out", "/proc/forbidden_dir"});
  CHECK(bad.code == kExitRuntime);
  CHECK_FALSE(bad.err.empty());
}

TEST_CASE("fit, refit, eval and export") {
  TempDir dir("gamtl_cli_fit");
  REQUIRE(run({"synth", "syn1", "--seed", "3", "--out", dir / "data"}).code == kExitOk);

  const auto fit1 = run({"fit", "--data", dir / "data/train.csv", "--preset", "syn1", "--out", dir / "m1"});
  REQUIRE(fit1.code == kExitOk);
  const GamtlModel model = load_model(dir / "m1/model.json");
  CHECK(model.A.has_positive_degrees());
  CHECK(model.W.cols() == 20);
  CHECK(fs::exists(dir / "m1/trace.json"));

  REQUIRE(run({"fit", "--data", dir / "data/train.csv", "--preset", "syn1", "--out", dir / "m2"}).code == kExitOk);
  CHECK(slurp(dir / "m1/model.json") == slurp(dir / "m2/model.json"));

  const auto eval = run({"eval", "--model", dir / "m1/model.json", "--data", dir / "data/test.csv"});
  REQUIRE(eval.code == kExitOk);
  const Json report = Json::parse(eval.out);
  CHECK(report["rmse"]["pooled"].get<double>() > 0.0);

  const auto dot = run({"export", "--model", dir / "m1/model.json", "--format", "dot"});
  CHECK(dot.code == kExitOk);
  CHECK(dot.out.rfind("graph tasks {", 0) == 0);

  const auto zero = run({"fit", "--data", dir / "data/train.csv", "--gamma", "0", "--out", dir / "m3"});
  CHECK(zero.code == kExitOk);
  CHECK(zero.err.find("gamma = 0") != std::string::npos);
}

TEST_CASE("perfect model and single edge") {
  TempDir dir("gamtl_cli_perfect");
  GamtlModel model;
  model.task_ids = {0, 1};
  model.W = Matrix(2, 2);
  model.W << 1, -1, 2, 0.5;
  Matrix a(2, 2);
  a << 0, 0.7, 0.7, 0;
  model.A = AdjacencyMatrix(a);
  save_model(dir / "model.json", model);

  std::vector<TaskDataset> test;
  for (int t = 0; t < 2; ++t) {
    TaskDataset task{t, Matrix::Random(2, 5), Vector()};
    task.y = task.X.transpose() * model.W.col(t);
    test.push_back(task);
  }
  write_csv_tasks(dir / "test.csv", test);

  const auto eval = run({"eval", "--model", dir / "model.json", "--data", dir / "test.csv"});
  REQUIRE(eval.code == kExitOk);
  CHECK(Json::parse(eval.out)["rmse"]["pooled"].get<double>() < 1e-12);

  const auto dot = run({"export", "--model", dir / "model.json", "--format", "dot", "--threshold", "0"});
  REQUIRE(dot.code == kExitOk);
  std::size_t edges = 0;
  for (std::size_t pos = dot.out.find(" -- "); pos != std::string::npos; pos = dot.out.find(" -- ", pos + 1)) ++edges;
  CHECK(edges == 1);

  test[1].task_id = 5;
  write_csv_tasks(dir / "other.csv", test);
  const auto mismatch = run({"eval", "--model", dir / "model.json", "--data", dir / "other.csv"});
  CHECK(mismatch.code != kExitOk);
  CHECK(mismatch.err.find("task 5") != std::string::npos);
}

TEST_CASE("validation errors exit with code 1") {
  TempDir dir("gamtl_cli_errors");
  std::ofstream(dir / "bad.json") << R"({"model": {"gama": 1}})";
  const auto unknown = run({"bench", "--config", dir / "bad.json"});
  CHECK(unknown.code == kExitUsage);
  CHECK(unknown.err.find("model.gama") != std::string::npos);

  CHECK(run({"nonsense"}).code == kExitUsage);
  CHECK(run({"fit", "--gamma", "abc"}).code == kExitUsage);
  CHECK(run({"export"}).code == kExitUsage);
  CHECK(run({"bench", "--set", "model.alpha=-1"}).code == kExitUsage);
  CHECK(run({"eval", "--model", dir / "missing.json", "--data", dir / "x.csv"}).code == kExitRuntime);
}

TEST_CASE("bench is reproducible") {
  TempDir dir("gamtl_cli_bench");
  const std::vector<std::string> args{"bench", "--set", "bench.runs=2", "--set", "data.n_train=15",
                                      "--set", "data.n_test=10", "--set", "bench.methods=[\"ridge\",\"gamtl\"]"};
  auto first = args;
  first.insert(first.end(), {"--out", dir / "a"});
  auto second = args;
  second.insert(second.end(), {"--out", dir / "b"});
  REQUIRE(run(first).code == kExitOk);
  REQUIRE(run(second).code == kExitOk);
  CHECK(slurp(dir / "a/bench.json") == slurp(dir / "b/bench.json"));
  const Json doc = read_json_file(dir / "a/bench.json");
  CHECK(doc["reports"].size() == 2);
  CHECK(doc["reports"][1]["rmse_values"].size() == 2);
}
