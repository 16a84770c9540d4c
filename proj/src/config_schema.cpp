#include "gamtl/config_schema.hpp"

#include "gamtl/data.hpp"
#include "gamtl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gamtl {

namespace {

enum class Kind { kObject, kNumber, kInteger, kUnsigned, kBool, kString, kStringArray };

struct Field {
  std::string name;
  Kind kind;
  std::vector<Field> children;
};

const char* kind_name(Kind kind) {
  switch (kind) {
    case Kind::kObject: return "an object";
    case Kind::kNumber: return "a number";
    case Kind::kInteger: return "an integer";
    case Kind::kUnsigned: return "a nonnegative integer";
    case Kind::kBool: return "a boolean";
    case Kind::kString: return "a string";
    case Kind::kStringArray: return "an array of strings";
  }
  return "?";
}

const std::vector<Field>& model_fields() {
  static const std::vector<Field> fields{
      {"gamma", Kind::kNumber, {}},          {"alpha", Kind::kNumber, {}},
      {"beta", Kind::kNumber, {}},           {"graph_step", Kind::kNumber, {}},
      {"graph_tol", Kind::kNumber, {}},      {"graph_max_iter", Kind::kInteger, {}},
      {"graph_polish_iter", Kind::kInteger, {}}, {"graph_polish_tol", Kind::kNumber, {}},
      {"outer_tol", Kind::kNumber, {}},      {"max_outer_iter", Kind::kInteger, {}},
      {"weight_solver_tol", Kind::kNumber, {}}, {"max_cg_iter", Kind::kInteger, {}},
      {"ridge_lambda", Kind::kNumber, {}},   {"learn_graph", Kind::kBool, {}},
  };
  return fields;
}

const Field& root_schema() {
  static const Field root{
      "",
      Kind::kObject,
      {
          {"seed", Kind::kUnsigned, {}},
          {"data",
           Kind::kObject,
           {
               {"generator", Kind::kString, {}},
               {"train", Kind::kString, {}},
               {"test", Kind::kString, {}},
               {"n_train", Kind::kInteger, {}},
               {"n_test", Kind::kInteger, {}},
               {"noise_std", Kind::kNumber, {}},
               {"split_ratio", Kind::kNumber, {}},
               {"csv",
                Kind::kObject,
                {
                    {"task_column", Kind::kString, {}},
                    {"target_column", Kind::kString, {}},
                    {"feature_columns", Kind::kStringArray, {}},
                    {"standardize", Kind::kBool, {}},
                    {"standardize_target", Kind::kBool, {}},
                }},
               {"wiener",
                Kind::kObject,
                {
                    {"samples_per_agent", Kind::kInteger, {}},
                    {"burn_in", Kind::kInteger, {}},
                    {"rho", Kind::kNumber, {}},
                }},
           }},
          {"model", Kind::kObject, model_fields()},
          {"rbf",
           Kind::kObject,
           {
               {"enabled", Kind::kBool, {}},
               {"centers", Kind::kInteger, {}},
               {"width_factor", Kind::kNumber, {}},
               {"single_center_width", Kind::kNumber, {}},
               {"bias", Kind::kBool, {}},
           }},
          {"bench",
           Kind::kObject,
           {
               {"runs", Kind::kInteger, {}},
               {"methods", Kind::kStringArray, {}},
           }},
          {"export",
           Kind::kObject,
           {
               {"format", Kind::kString, {}},
               {"threshold", Kind::kNumber, {}},
               {"degree_ratio", Kind::kNumber, {}},
           }},
      }};
  return root;
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check(const Json& value, const Field& field, const std::string& path) {
  auto fail = [&](const std::string& what) {
    throw ConfigError((path.empty() ? std::string("config") : path) + ": " + what);
  };
  switch (field.kind) {
    case Kind::kObject: {
      if (!value.is_object()) fail("expected an object");
      for (const auto& [key, child] : value.items()) {
        const auto it = std::find_if(field.children.begin(), field.children.end(),
                                     [&key](const Field& f) { return f.name == key; });
        if (it == field.children.end()) {
          throw ConfigError(join(path, key) + ": unknown key");
        }
        check(child, *it, join(path, key));
      }
      return;
    }
    case Kind::kNumber:
      if (!value.is_number() || !std::isfinite(value.get<double>())) {
        fail(std::string("expected ") + kind_name(field.kind));
      }
      return;
    case Kind::kInteger:
      if (!value.is_number_integer()) fail(std::string("expected ") + kind_name(field.kind));
      return;
    case Kind::kUnsigned:
      if (!value.is_number_unsigned()) fail(std::string("expected ") + kind_name(field.kind));
      return;
    case Kind::kBool:
      if (!value.is_boolean()) fail(std::string("expected ") + kind_name(field.kind));
      return;
    case Kind::kString:
      if (!value.is_string()) fail(std::string("expected ") + kind_name(field.kind));
      return;
    case Kind::kStringArray:
      if (!value.is_array()) fail(std::string("expected ") + kind_name(field.kind));
      for (const auto& item : value) {
        if (!item.is_string()) fail(std::string("expected ") + kind_name(field.kind));
      }
      return;
  }
}

template <typename T>
void read(const Json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

template <typename Fn>
void with_path(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace

Json model_config_to_json(const GamtlConfig& c) {
  return Json{{"gamma", c.gamma},
              {"alpha", c.graph_params.alpha},
              {"beta", c.graph_params.beta},
              {"graph_step", c.graph_params.step},
              {"graph_tol", c.graph_params.tol},
              {"graph_max_iter", c.graph_params.max_iter},
              {"graph_polish_iter", c.graph_params.polish_iter},
              {"graph_polish_tol", c.graph_params.polish_tol},
              {"outer_tol", c.outer_tol},
              {"max_outer_iter", c.max_outer_iter},
              {"weight_solver_tol", c.weight_solver_tol},
              {"max_cg_iter", c.max_cg_iter},
              {"ridge_lambda", c.ridge_lambda},
              {"learn_graph", c.learn_graph}};
}

GamtlConfig model_config_from_json(const Json& section, const std::string& path) {
  check(section, Field{"", Kind::kObject, model_fields()}, path);
  GamtlConfig c;
  read(section, "gamma", c.gamma);
  read(section, "alpha", c.graph_params.alpha);
  read(section, "beta", c.graph_params.beta);
  read(section, "graph_step", c.graph_params.step);
  read(section, "graph_tol", c.graph_params.tol);
  read(section, "graph_max_iter", c.graph_params.max_iter);
  read(section, "graph_polish_iter", c.graph_params.polish_iter);
  read(section, "graph_polish_tol", c.graph_params.polish_tol);
  read(section, "outer_tol", c.outer_tol);
  read(section, "max_outer_iter", c.max_outer_iter);
  read(section, "weight_solver_tol", c.weight_solver_tol);
  read(section, "max_cg_iter", c.max_cg_iter);
  read(section, "ridge_lambda", c.ridge_lambda);
  read(section, "learn_graph", c.learn_graph);
  with_path(path, [&c] { validate(c); });
  return c;
}

Json default_run_config() { return run_config_to_json(RunConfig{}); }

RunConfig parse_run_config(const Json& doc) {
  check(doc, root_schema(), "");
  RunConfig rc;
  read(doc, "seed", rc.seed);

  const Json empty = Json::object();
  const Json& data = doc.contains("data") ? doc.at("data") : empty;
  read(data, "generator", rc.data.generator);
  read(data, "train", rc.data.train);
  read(data, "test", rc.data.test);
  read(data, "n_train", rc.data.n_train);
  read(data, "n_test", rc.data.n_test);
  read(data, "noise_std", rc.data.noise_std);
  read(data, "split_ratio", rc.data.split_ratio);
  const std::vector<std::string> generators{"syn1", "syn2", "wiener", "csv"};
  if (std::find(generators.begin(), generators.end(), rc.data.generator) == generators.end()) {
    throw ConfigError("data.generator: expected one of syn1, syn2, wiener, csv");
  }
  with_path("data", [&rc] {
    validate(SynSpec{0, rc.data.n_train, rc.data.n_test, rc.data.noise_std});
  });
  if (!(rc.data.split_ratio > 0.0 && rc.data.split_ratio < 1.0)) {
    throw ConfigError("data.split_ratio: must lie in (0, 1)");
  }
  if (data.contains("csv")) {
    const Json& csv = data.at("csv");
    read(csv, "task_column", rc.data.csv.task_column);
    read(csv, "target_column", rc.data.csv.target_column);
    read(csv, "feature_columns", rc.data.csv.feature_columns);
    read(csv, "standardize", rc.data.csv.standardize);
    read(csv, "standardize_target", rc.data.csv.standardize_target);
  }
  if (data.contains("wiener")) {
    const Json& w = data.at("wiener");
    read(w, "samples_per_agent", rc.data.wiener.samples_per_agent);
    read(w, "burn_in", rc.data.wiener.burn_in);
    read(w, "rho", rc.data.wiener.rho);
  }
  with_path("data.wiener", [&rc] { validate(rc.data.wiener); });

  rc.model = model_config_from_json(doc.contains("model") ? doc.at("model") : empty, "model");
  rc.model.seed = rc.seed;

  if (doc.contains("rbf")) {
    const Json& r = doc.at("rbf");
    read(r, "enabled", rc.rbf.enabled);
    read(r, "centers", rc.rbf.options.centers);
    read(r, "width_factor", rc.rbf.options.width_factor);
    read(r, "single_center_width", rc.rbf.options.single_center_width);
    read(r, "bias", rc.rbf.options.bias);
  }
  with_path("rbf", [&rc] { validate(rc.rbf.options); });

  if (doc.contains("bench")) {
    read(doc.at("bench"), "runs", rc.bench.runs);
    read(doc.at("bench"), "methods", rc.bench.methods);
  }
  if (rc.bench.runs < 1) throw ConfigError("bench.runs: must be at least 1");
  if (rc.bench.methods.empty()) throw ConfigError("bench.methods: must not be empty");
  for (const auto& m : rc.bench.methods) {
    with_path("bench.methods", [&m] { method_kind_from_string(m); });
  }

  if (doc.contains("export")) {
    read(doc.at("export"), "format", rc.export_graph.format);
    read(doc.at("export"), "threshold", rc.export_graph.threshold);
    read(doc.at("export"), "degree_ratio", rc.export_graph.degree_ratio);
  }
  with_path("export.format", [&rc] { graph_format_from_string(rc.export_graph.format); });
  if (!(rc.export_graph.degree_ratio >= 0.0)) {
    throw ConfigError("export.degree_ratio: must be nonnegative");
  }
  return rc;
}

Json run_config_to_json(const RunConfig& rc) {
  const auto& d = rc.data;
  return Json{
      {"seed", rc.seed},
      {"data",
       {{"generator", d.generator},
        {"train", d.train},
        {"test", d.test},
        {"n_train", d.n_train},
        {"n_test", d.n_test},
        {"noise_std", d.noise_std},
        {"split_ratio", d.split_ratio},
        {"csv",
         {{"task_column", d.csv.task_column},
          {"target_column", d.csv.target_column},
          {"feature_columns", d.csv.feature_columns},
          {"standardize", d.csv.standardize},
          {"standardize_target", d.csv.standardize_target}}},
        {"wiener",
         {{"samples_per_agent", d.wiener.samples_per_agent},
          {"burn_in", d.wiener.burn_in},
          {"rho", d.wiener.rho}}}}},
      {"model", model_config_to_json(rc.model)},
      {"rbf",
       {{"enabled", rc.rbf.enabled},
        {"centers", rc.rbf.options.centers},
        {"width_factor", rc.rbf.options.width_factor},
        {"single_center_width", rc.rbf.options.single_center_width},
        {"bias", rc.rbf.options.bias}}},
      {"bench", {{"runs", rc.bench.runs}, {"methods", rc.bench.methods}}},
      {"export",
       {{"format", rc.export_graph.format},
        {"threshold", rc.export_graph.threshold},
        {"degree_ratio", rc.export_graph.degree_ratio}}}};
}

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;

  if (!doc.is_object()) doc = Json::object();
  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("--set key '" + key + "' has an empty component");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    Json& next = (*node)[part];
    if (!next.is_object()) {
      if (!next.is_null()) {
        throw ConfigError(key.substr(0, dot) + ": is not an object");
      }
      next = Json::object();
    }
    node = &next;
    start = dot + 1;
  }
}

TrainTest generate_dataset(const RunConfig& rc, std::uint64_t seed, Json* truth) {
  const auto& d = rc.data;
  if (d.generator == "syn1" || d.generator == "syn2") {
    const SynSpec spec{seed, d.n_train, d.n_test, d.noise_std};
    SyntheticDataset ds = d.generator == "syn1" ? gen_syn1(spec) : gen_syn2(spec);
    if (truth) {
      Json W = Json::array();
      for (Index i = 0; i < ds.true_W.rows(); ++i) {
        for (Index j = 0; j < ds.true_W.cols(); ++j) W.push_back(ds.true_W(i, j));
      }
      (*truth)["true_W"] = std::move(W);
      if (!ds.groups.empty()) (*truth)["groups"] = ds.groups;
    }
    return {std::move(ds.train), std::move(ds.test)};
  }
  if (d.generator == "wiener") {
    WienerNetworkSpec spec = d.wiener;
    spec.seed = seed;
    WienerNetworkData wd = gen_wiener_network(spec);
    auto split = train_test_split(wd.tasks, d.split_ratio, seed);
    return {std::move(split.train), std::move(split.test)};
  }
  if (d.generator == "csv") {
    if (d.train.empty()) throw ConfigError("data.train: a CSV path is required");
    CsvSchema raw = d.csv;
    raw.standardize = false;
    raw.standardize_target = false;
    std::vector<TaskDataset> tasks = load_csv_tasks(d.train, raw);
    TrainTestSplit split = train_test_split(tasks, d.split_ratio, seed);
    if (d.csv.standardize || d.csv.standardize_target) {
      // Statistics come from the training rows only.
      Standardizer s = Standardizer::fit(split.train, d.csv.standardize_target);
      if (!d.csv.standardize) {
        s.feature_mean.setZero();
        s.feature_scale.setOnes();
      }
      split.train = s.apply(split.train);
      split.test = s.apply(split.test);
    }
    return {std::move(split.train), std::move(split.test)};
  }
  throw ConfigError("data.generator: unknown generator '" + d.generator + "'");
}

}  // namespace gamtl
