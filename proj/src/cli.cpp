#include "gamtl/cli.hpp"

#include <filesystem>
#include <optional>
#include <ostream>

#include "CLI11.hpp"

#include "gamtl/config_schema.hpp"
#include "gamtl/data.hpp"
#include "gamtl/errors.hpp"
#include "gamtl/eval.hpp"
#include "gamtl/model_io.hpp"
#include "gamtl/presets.hpp"
#include "gamtl/rbf_gamtl.hpp"

namespace gamtl {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool rbf = false;
  std::optional<double> gamma, alpha, beta, threshold;
  std::string format;
  std::string model_path;
  std::string data_path;
  std::string generator;
  std::string preset;
};

// Preset, then the config file, then --set overrides, then dedicated flags.
RunConfig load_config(const Options& o, const std::string& command) {
  Json doc = o.preset.empty() ? Json::object() : preset_run_config(o.preset);
  if (!o.config_path.empty()) {
    const Json file = read_json_file(o.config_path);
    if (!file.is_object()) throw ConfigError("config: expected an object");
    doc.merge_patch(file);
  }
  for (const auto& assignment : o.overrides) apply_override(doc, assignment);
  if (o.seed) doc["seed"] = *o.seed;
  if (o.gamma) doc["model"]["gamma"] = *o.gamma;
  if (o.alpha) doc["model"]["alpha"] = *o.alpha;
  if (o.beta) doc["model"]["beta"] = *o.beta;
  if (o.rbf) doc["rbf"]["enabled"] = true;
  if (o.threshold) doc["export"]["threshold"] = *o.threshold;
  if (!o.format.empty()) doc["export"]["format"] = o.format;
  if (!o.generator.empty()) doc["data"]["generator"] = o.generator;
  if (!o.data_path.empty()) doc["data"][command == "eval" ? "test" : "train"] = o.data_path;
  return parse_run_config(doc);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory '" + dir + "'");
}

std::string out_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir.empty() ? "." : dir) / name).string();
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

CsvSchema plain_schema(const RunConfig& rc, const std::string& key) {
  if (rc.data.csv.standardize || rc.data.csv.standardize_target) {
    throw ConfigError("data.csv." + key + ": standardization is only applied by bench");
  }
  return rc.data.csv;
}

Json counts(const std::vector<TaskDataset>& tasks) {
  Json out = Json::array();
  for (const auto& t : tasks) out.push_back(t.y.size());
  return out;
}

Json task_ids(const std::vector<TaskDataset>& tasks) {
  Json out = Json::array();
  for (const auto& t : tasks) out.push_back(t.task_id);
  return out;
}

int cmd_synth(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.generator != "syn1" && o.generator != "syn2" && o.generator != "wiener") {
    throw ConfigError("synth: dataset must be syn1, syn2 or wiener");
  }
  const RunConfig rc = load_config(o, "synth");
  Json manifest{{"name", rc.data.generator}, {"seed", rc.seed}};
  const TrainTest data = generate_dataset(rc, rc.seed, &manifest);
  const std::string dir = o.out.empty() ? "." : o.out;
  ensure_dir(dir);
  write_csv_tasks(out_path(dir, "train.csv"), data.train);
  write_csv_tasks(out_path(dir, "test.csv"), data.test);
  manifest["tasks"] = data.train.size();
  manifest["d"] = data.train.front().X.rows();
  manifest["task_ids"] = task_ids(data.train);
  manifest["counts"] = {{"train", counts(data.train)}, {"test", counts(data.test)}};
  manifest["config"] = run_config_to_json(rc)["data"];
  write_text_file(out_path(dir, "manifest.json"), dump_json(manifest));
  out << "wrote " << out_path(dir, "train.csv") << ", " << out_path(dir, "test.csv")
      << ", " << out_path(dir, "manifest.json") << "\n";
  (void)err;
  return kExitOk;
}

int cmd_fit(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig rc = load_config(o, "fit");
  if (rc.data.train.empty()) throw ConfigError("data.train: training CSV required (--data)");
  const std::vector<TaskDataset> tasks = load_csv_tasks(rc.data.train, plain_schema(rc, "standardize"));
  if (rc.model.gamma == 0.0) {
    err << "warning: gamma = 0 disables graph coupling; tasks are fitted independently\n";
  }
  const GamtlModel model =
      rc.rbf.enabled ? fit_rbf(tasks, rc.rbf.options, rc.model) : fit(tasks, rc.model);
  for (const auto& w : model.warnings) err << "warning: " << w << "\n";

  const std::string dir = o.out.empty() ? "." : o.out;
  ensure_dir(dir);
  save_model(out_path(dir, "model.json"), model);
  Json trace = trace_to_json(model.trace);
  trace["status"] = to_string(model.status);
  write_text_file(out_path(dir, "trace.json"), dump_json(trace));
  out << "fit " << (rc.rbf.enabled ? "rbf-gamtl" : "gamtl") << ": " << tasks.size()
      << " tasks, " << model.trace.iterations.size() << " outer iterations, status "
      << to_string(model.status) << "\n";
  return model.status == FitStatus::kNumericalFailure ? kExitRuntime : kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream&) {
  if (o.model_path.empty()) throw ConfigError("eval: --model is required");
  const RunConfig rc = load_config(o, "eval");
  if (rc.data.test.empty()) throw ConfigError("data.test: test CSV required (--data)");
  const GamtlModel model = load_model(o.model_path);
  const auto test = load_csv_tasks(rc.data.test, plain_schema(rc, "standardize"));
  for (const auto& task : test) {
    const auto& ids = model.task_ids;
    if (std::find(ids.begin(), ids.end(), task.task_id) == ids.end()) {
      throw InvalidInput("test task " + std::to_string(task.task_id) + " is not in the model");
    }
  }
  const RmseResult result = rmse(model, test);
  emit(dump_json(Json{{"rmse", rmse_to_json(result)}}), o.out, out);
  return kExitOk;
}

int cmd_export(const Options& o, std::ostream& out, std::ostream&) {
  if (o.model_path.empty()) throw ConfigError("export: --model is required");
  const RunConfig rc = load_config(o, "export");
  const GamtlModel model = load_model(o.model_path);
  const double threshold = rc.export_graph.threshold < 0.0 ? default_export_threshold(model.A)
                                                           : rc.export_graph.threshold;
  emit(export_graph(model.A, threshold, graph_format_from_string(rc.export_graph.format),
                    rc.export_graph.degree_ratio),
       o.out, out);
  return kExitOk;
}

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig rc = load_config(o, "bench");
  const DatasetFactory factory = [&rc](std::uint64_t seed) { return generate_dataset(rc, seed); };
  Json reports = Json::array();
  bool failed = false;
  for (const auto& name : rc.bench.methods) {
    BenchmarkMethod method;
    method.kind = method_kind_from_string(name);
    method.label = name;
    method.config = rc.model;
    method.rbf = rc.rbf.options;
    const BenchmarkReport report = benchmark(factory, method, rc.bench.runs, rc.seed);
    failed = failed || report.flagged;
    for (const auto& run : report.runs) {
      if (!run.ok) err << "warning: " << name << " seed " << run.seed << " failed: " << run.error << "\n";
    }
    out << name << ": RMSE " << report.mean << " +- " << report.std << " over "
        << report.rmse_values.size() << " runs\n";
    reports.push_back(report_to_json(report));
  }
  const Json doc{{"config", run_config_to_json(rc)}, {"reports", std::move(reports)}};
  if (o.out.empty()) {
    out << dump_json(doc);
  } else {
    ensure_dir(o.out);
    write_text_file(out_path(o.out, "bench.json"), dump_json(doc));
  }
  return failed ? kExitRuntime : kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph adjacency multi-task learning"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "JSON run configuration");
    sub->add_option("--set", o.overrides, "Override a config key, e.g. model.alpha=2")
        ->type_name("KEY=VALUE");
    sub->add_option("--seed", o.seed, "Seed for all randomness");
    sub->add_option("--out", o.out, "Output location");
    sub->add_option("--preset", o.preset, "Start from the tuned syn1, syn2 or wiener settings");
  };

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("dataset", o.generator, "syn1, syn2 or wiener")->required();
  add_common(synth);

  auto* fit_cmd = app.add_subcommand("fit", "Fit GAMTL or RBF-GAMTL on a training CSV");
  add_common(fit_cmd);
  fit_cmd->add_option("--data", o.data_path, "Training CSV (task,y,x0,...)");
  fit_cmd->add_flag("--rbf", o.rbf, "Fit RBF-GAMTL");
  fit_cmd->add_option("--gamma", o.gamma, "Graph regularizer weight");
  fit_cmd->add_option("--alpha", o.alpha, "Log-degree barrier weight");
  fit_cmd->add_option("--beta", o.beta, "Frobenius penalty weight");

  auto* eval_cmd = app.add_subcommand("eval", "RMSE of a model on a test CSV");
  add_common(eval_cmd);
  eval_cmd->add_option("--model", o.model_path, "Model JSON")->required();
  eval_cmd->add_option("--data", o.data_path, "Test CSV");

  auto* export_cmd = app.add_subcommand("export", "Export the learned task graph");
  add_common(export_cmd);
  export_cmd->add_option("--model", o.model_path, "Model JSON")->required();
  export_cmd->add_option("--format", o.format, "edge-csv, dot or json");
  export_cmd->add_option("--threshold", o.threshold, "Keep edges above this weight");

  auto* bench_cmd = app.add_subcommand("bench", "Repeated seeded runs with mean and std");
  add_common(bench_cmd);
  bench_cmd->add_option("--gamma", o.gamma, "Graph regularizer weight");
  bench_cmd->add_option("--alpha", o.alpha, "Log-degree barrier weight");
  bench_cmd->add_option("--beta", o.beta, "Frobenius penalty weight");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (!app.get_subcommands().empty()) {
      err << app.get_subcommands().front()->help();
    } else {
      err << app.help();
    }
    return kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(o, out, err);
    if (fit_cmd->parsed()) return cmd_fit(o, out, err);
    if (eval_cmd->parsed()) return cmd_eval(o, out, err);
    if (export_cmd->parsed()) return cmd_export(o, out, err);
    if (bench_cmd->parsed()) return cmd_bench(o, out, err);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace gamtl
