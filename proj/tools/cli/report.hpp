#pragma once

#include <string>

#include "collapse/batch.hpp"
#include "collapse/cochran.hpp"
#include "collapse/collapse.hpp"
#include "collapse/quantile.hpp"
#include "io.hpp"

namespace collapse::cli {

inline constexpr const char* kSchema = "collapse-kit/1";
inline constexpr const char* kVersion = "1.0.0";

std::string sha256_hex(const std::string& bytes);

// Skeleton shared by every report: schema, tool, command and input
// fingerprint. Timing is added last by the caller.
Json report_header(const std::string& command, const std::string& input_path, const std::string& input_bytes);

Json to_json(const Verdict& v);
Json to_json(const Witness& w);
Json to_json(const ClassMembership& m);
Json to_json(const SufficiencyNecessity& r);
Json to_json(const CochranDecomposition& d);
Json to_json(const BatchReport& r);
Json to_json(const EvalGrid& g);
Json to_json(const DependenceField& f);
Json to_json(const QuantileProfile& p);
Json model_json(const ContinuousModel& m);

// A number that may be NaN (JSON null).
Json number_or_null(double v);

// One line per check: property,applicable,holds,max_violation,tolerance.
std::string csv_summary(const Json& report);

}  // namespace collapse::cli
