#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "collapse/cochran.hpp"
#include "collapse/model.hpp"

namespace collapse::cli {

using Json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path);

// CSV with header y,x,w,count (any column order). Errors carry line numbers.
std::vector<TableRow> parse_table_csv(const std::string& text);

// CSV with header y,x,w of numeric samples.
std::vector<Sample3> parse_sample_csv(const std::string& text);

// {"covariance": [[..],[..],[..]]} or a bare 3x3 array, order (Y, X, W).
Cov3 parse_covariance_json(const std::string& text);

struct ModelConfig {
  ModelPtr model;
  std::optional<EvalGrid> evaluation;  // "evaluation": {"y": ..., "x": ..., "w": ...}
};

// {"family", "params", "truncation": {"sd"}, "grid": {...}, "evaluation": {...}}.
// A "grid" family takes tabulated arrays xs, ws, ys, cdf_y [ix][iw][iy],
// cdf_w [ix][iw], or {"from": {family, params}, xs, ws, ys} to tabulate a
// built-in family.
ModelConfig parse_model_config(const std::string& text);

// An axis spec: a list of points or {"lo", "hi", "n"}.
std::vector<double> parse_axis(const Json& j, const char* name);

// {"y", "x", "w"} axis specs.
EvalGrid parse_grid(const Json& j);

// "auto", "NYxNXxNW" (automatic ranges with those sizes) or a JSON file
// holding {"y", "x", "w"} axis specs.
EvalGrid resolve_grid(const std::string& spec, const ContinuousModel& model, const NumericOptions& opts);

// Optional run configuration (--config). Command-line flags override it.
struct RunConfig {
  std::vector<std::string> checks;
  std::map<std::string, double> tolerances;
  std::optional<std::string> grid;
  std::optional<Json> grid_inline;
  std::optional<std::string> order;
  LevelOrdering levels;
  std::optional<bool> emit_fields;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> count;
  std::optional<std::string> suite;
};

RunConfig parse_run_config(const std::string& text);

}  // namespace collapse::cli
