#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "io.hpp"

namespace collapse::cli {

struct Options {
  std::vector<std::string> checks;
  std::vector<std::string> tolerances;  // "check=value"
  std::optional<std::string> grid;
  std::optional<std::string> out;
  std::optional<std::string> format;  // json | csv-summary
  std::optional<std::string> order;   // numeric | appearance
  std::optional<std::string> config;
  bool emit_fields = false;
  bool serial = false;
};

struct BatchArgs {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> count;
  std::optional<std::string> suite;
};

struct Outcome {
  Json report;
  int exit_code = 0;
  std::string format = "json";
  std::optional<std::string> out;
};

Outcome cmd_table(const std::string& csv_path, const Options& opts);
Outcome cmd_model(const std::string& config_path, const Options& opts);
Outcome cmd_cochran(const std::string& path, const Options& opts);
Outcome cmd_batch(const BatchArgs& args, const Options& opts);

// Writes to the resolved output path (or stdout) in the resolved format.
void emit(const Outcome& outcome);

inline const std::vector<std::string>& table_checks() {
  static const std::vector<std::string> v{"homogeneity",     "collapsibility", "uniform_collapsibility",
                                          "A_collapsibility", "independence",   "sufficiency_necessity",
                                          "reversal"};
  return v;
}

inline const std::vector<std::string>& model_checks() {
  static const std::vector<std::string> v{"decomposition",
                                          "homogeneity",
                                          "collapsibility",
                                          "A_collapsibility",
                                          "residual_integral",
                                          "density_A_collapsibility",
                                          "independence",
                                          "sufficiency_necessity",
                                          "reversal",
                                          "quantile_A_collapsibility",
                                          "criterion_integral",
                                          "cox_identity",
                                          "quantile_equals_total_effect",
                                          "product_vanishes"};
  return v;
}

}  // namespace collapse::cli
