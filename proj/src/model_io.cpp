#include "gamtl/model_io.hpp"

#include <fstream>
#include <sstream>

#include "gamtl/errors.hpp"

namespace gamtl {

namespace {

Json row_major(const Matrix& m) {
  Json out = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  }
  return out;
}

Matrix matrix_from(const Json& values, Index rows, Index cols, const std::string& field) {
  if (!values.is_array() || static_cast<Index>(values.size()) != rows * cols) {
    throw InvalidInput("model." + field + ": expected " + std::to_string(rows * cols) +
                       " numbers");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const Json& v = values[static_cast<std::size_t>(i * cols + j)];
      if (!v.is_number()) throw InvalidInput("model." + field + ": expected numbers");
      m(i, j) = v.get<double>();
    }
  }
  return m;
}

const Json& require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw InvalidInput(where + ": missing field '" + key + "'");
  }
  return obj.at(key);
}

FitStatus status_from_string(const std::string& s) {
  if (s == "converged") return FitStatus::kConverged;
  if (s == "max_iterations") return FitStatus::kMaxIterations;
  if (s == "numerical_failure") return FitStatus::kNumericalFailure;
  throw InvalidInput("model.status: unknown value '" + s + "'");
}

}  // namespace

Json trace_to_json(const FitTrace& trace) {
  Json iterations = Json::array();
  for (const auto& it : trace.iterations) {
    iterations.push_back({{"objective_after_weights", it.objective_after_weights},
                          {"objective_after_graph", it.objective_after_graph},
                          {"cg_iterations", it.weight_report.iterations},
                          {"cg_relative_residual", it.weight_report.relative_residual},
                          {"cg_converged", it.weight_report.converged},
                          {"kept_warm_start", it.weight_report.kept_warm_start},
                          {"ridge", it.weight_report.ridge},
                          {"graph_iterations", it.graph_iterations},
                          {"graph_converged", it.graph_converged}});
  }
  return Json{{"initial_objective", trace.initial_objective},
              {"iterations", std::move(iterations)},
              {"objective_sequence", trace.objective_sequence()}};
}

Json model_to_json(const GamtlModel& model) {
  const Index T = model.W.cols();
  Json dims{{"d", model.W.rows()}, {"T", T}};
  Json doc{{"format", "gamtl-model"}, {"version", 1}};
  if (model.feature_map) {
    dims["P"] = model.feature_map->center_count();
    dims["input_dim"] = model.feature_map->input_dim();
    doc["feature_map"] = {
        // Row-major input_dim x P: row k holds coordinate k of every center.
        {"centers", row_major(model.feature_map->centers)},
        {"widths", std::vector<double>(model.feature_map->widths.data(),
                                       model.feature_map->widths.data() +
                                           model.feature_map->widths.size())},
        {"bias", model.feature_map->bias}};
  }
  doc["dims"] = dims;
  doc["task_ids"] = model.task_ids;
  doc["W"] = row_major(model.W);
  Json upper = Json::array();
  for (Index i = 0; i < T; ++i) {
    for (Index j = i + 1; j < T; ++j) upper.push_back(model.A(i, j));
  }
  doc["A"] = std::move(upper);
  doc["config"] = {{"seed", model.config.seed}, {"model", model_config_to_json(model.config)}};
  doc["trace"] = trace_to_json(model.trace);
  doc["status"] = to_string(model.status);
  doc["warnings"] = model.warnings;
  return doc;
}

GamtlModel model_from_json(const Json& doc) {
  const std::string where = "model";
  if (!doc.is_object() || doc.value("format", "") != "gamtl-model") {
    throw InvalidInput("not a gamtl model document");
  }
  try {
    GamtlModel model;
    const Json& dims = require(doc, "dims", where);
    const Index d = require(dims, "d", "model.dims").get<Index>();
    const Index T = require(dims, "T", "model.dims").get<Index>();
    if (d < 1 || T < 2) throw InvalidInput("model.dims: need d >= 1 and T >= 2");

    model.task_ids = require(doc, "task_ids", where).get<std::vector<int>>();
    if (static_cast<Index>(model.task_ids.size()) != T) {
      throw InvalidInput("model.task_ids: expected " + std::to_string(T) + " ids");
    }
    model.W = matrix_from(require(doc, "W", where), d, T, "W");

    const Json& upper = require(doc, "A", where);
    if (!upper.is_array() || static_cast<Index>(upper.size()) != T * (T - 1) / 2) {
      throw InvalidInput("model.A: expected " + std::to_string(T * (T - 1) / 2) + " numbers");
    }
    Matrix A = Matrix::Zero(T, T);
    std::size_t e = 0;
    for (Index i = 0; i < T; ++i) {
      for (Index j = i + 1; j < T; ++j) {
        A(i, j) = upper[e++].get<double>();
        A(j, i) = A(i, j);
      }
    }
    model.A = AdjacencyMatrix(std::move(A));

    if (doc.contains("feature_map")) {
      const Json& fm = doc.at("feature_map");
      const Index P = require(dims, "P", "model.dims").get<Index>();
      const Index input_dim = require(dims, "input_dim", "model.dims").get<Index>();
      RbfFeatureMap map;
      map.centers = matrix_from(require(fm, "centers", "model.feature_map"), input_dim, P,
                                "feature_map.centers");
      const auto widths = require(fm, "widths", "model.feature_map").get<std::vector<double>>();
      map.widths = Eigen::Map<const Vector>(widths.data(), static_cast<Index>(widths.size()));
      map.bias = require(fm, "bias", "model.feature_map").get<bool>();
      validate(map);
      if (map.lifted_dim() != d) {
        throw InvalidInput("model.feature_map: lifted dimension differs from dims.d");
      }
      model.feature_map = std::move(map);
    }

    const Json& config = require(doc, "config", where);
    model.config = model_config_from_json(require(config, "model", "model.config"),
                                          "model.config.model");
    model.config.seed = require(config, "seed", "model.config").get<std::uint64_t>();

    const Json& trace = require(doc, "trace", where);
    model.trace.initial_objective = require(trace, "initial_objective", "model.trace").get<double>();
    for (const Json& it : require(trace, "iterations", "model.trace")) {
      OuterIteration rec;
      rec.objective_after_weights = it.at("objective_after_weights").get<double>();
      rec.objective_after_graph = it.at("objective_after_graph").get<double>();
      rec.weight_report.iterations = it.at("cg_iterations").get<int>();
      rec.weight_report.relative_residual = it.at("cg_relative_residual").get<double>();
      rec.weight_report.converged = it.at("cg_converged").get<bool>();
      rec.weight_report.kept_warm_start = it.at("kept_warm_start").get<bool>();
      rec.weight_report.ridge = it.at("ridge").get<double>();
      rec.graph_iterations = it.at("graph_iterations").get<int>();
      rec.graph_converged = it.at("graph_converged").get<bool>();
      model.trace.iterations.push_back(rec);
    }
    model.status = status_from_string(require(doc, "status", where).get<std::string>());
    if (doc.contains("warnings")) model.warnings = doc.at("warnings").get<std::vector<std::string>>();
    return model;
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("malformed model document: ") + e.what());
  }
}

std::string dump_json(const Json& doc) { return doc.dump(2) + "\n"; }

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  Json doc = Json::parse(buffer.str(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw InvalidInput("'" + path + "' is not valid JSON");
  return doc;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

void save_model(const std::string& path, const GamtlModel& model) {
  write_text_file(path, dump_json(model_to_json(model)));
}

GamtlModel load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

Json rmse_to_json(const RmseResult& r) {
  return Json{{"task_ids", r.task_ids},
              {"per_task", std::vector<double>(r.per_task.data(), r.per_task.data() + r.per_task.size())},
              {"pooled", r.pooled},
              {"mean_of_tasks", r.mean_of_tasks}};
}

Json report_to_json(const BenchmarkReport& report) {
  Json runs = Json::array();
  for (const auto& run : report.runs) {
    Json r{{"seed", run.seed}, {"ok", run.ok}, {"status", run.status}};
    if (run.ok) r["rmse"] = rmse_to_json(run.rmse);
    if (!run.error.empty()) r["error"] = run.error;
    if (!run.objective_sequence.empty()) r["objective_sequence"] = run.objective_sequence;
    r["warnings"] = run.warnings;
    runs.push_back(std::move(r));
  }
  return Json{
      {"method", report.method},
      {"kind", to_string(report.kind)},
      {"config", {{"model", model_config_to_json(report.config)}}},
      {"seeds", report.seeds},
      {"rmse_values", report.rmse_values},
      {"mean", report.mean},
      {"std", report.std},
      {"mean_of_task_rmse", report.mean_of_task_rmse},
      {"task_ids", report.task_ids},
      {"per_task_mean_rmse",
       std::vector<double>(report.per_task_mean.data(),
                           report.per_task_mean.data() + report.per_task_mean.size())},
      {"failures", report.failures},
      {"flagged", report.flagged},
      {"runs", std::move(runs)}};
}

}  // namespace gamtl
