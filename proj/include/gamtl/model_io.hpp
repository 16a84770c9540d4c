#pragma once

#include <string>

#include "gamtl/config_schema.hpp"
#include "gamtl/eval.hpp"
#include "gamtl/gamtl.hpp"

namespace gamtl {

// {dims: {d, T, P?, input_dim?}, task_ids, W (row-major d x T),
//  A (strict upper triangle, row-major), feature_map?, config, trace,
//  status, warnings}. Doubles are written in shortest round-trip form, so
// save/load is lossless.
Json model_to_json(const GamtlModel& model);
GamtlModel model_from_json(const Json& doc);

void save_model(const std::string& path, const GamtlModel& model);
GamtlModel load_model(const std::string& path);

Json trace_to_json(const FitTrace& trace);
Json rmse_to_json(const RmseResult& result);
Json report_to_json(const BenchmarkReport& report);

// Pretty-printed with a trailing newline.
std::string dump_json(const Json& doc);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace gamtl
