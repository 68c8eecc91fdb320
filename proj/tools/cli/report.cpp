#include "report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "collapse/error.hpp"

namespace collapse::cli {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::ostringstream s;
  for (unsigned int k = 0; k < len; ++k) s << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[k]);
  return s.str();
}

Json report_header(const std::string& command, const std::string& input_path, const std::string& input_bytes) {
  Json r;
  r["schema"] = kSchema;
  r["tool"] = {{"name", "collapse-kit"}, {"version", kVersion}};
  r["command"] = command;
  r["input"] = {{"path", input_path}, {"sha256", sha256_hex(input_bytes)}, {"bytes", input_bytes.size()}};
  return r;
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const Witness& w) {
  Json j = Json::object();
  for (const auto& [k, v] : w.point) j[k] = v;
  for (const auto& [k, v] : w.cells) j[k] = v;
  Json values = Json::object();
  for (const auto& [k, v] : w.values) values[k] = number_or_null(v);
  j["values"] = values;
  return j;
}

Json to_json(const Verdict& v) {
  Json j;
  j["property"] = v.property;
  j["applicable"] = v.applicable;
  j["holds"] = v.holds;
  j["max_violation"] = v.max_violation;
  j["tolerance"] = v.tolerance;
  j["exact"] = v.exact;
  if (v.exact_violation) j["exact_violation"] = to_string(*v.exact_violation);
  if (v.property == "no_reversal") j["reversal"] = v.applicable && !v.holds;
  j["witness"] = v.witness ? to_json(*v.witness) : Json(nullptr);
  j["method"] = v.method;
  j["notes"] = v.notes;
  return j;
}

Json to_json(const ClassMembership& m) {
  return {{"in_C_H", m.in_C_H}, {"in_C_W", m.in_C_W}, {"in_C_A", m.in_C_A}, {"in_C1", m.in_C1}, {"in_C2", m.in_C2}};
}

Json to_json(const SufficiencyNecessity& r) {
  Json j;
  j["property"] = "sufficiency_necessity";
  j["C1_Y_indep_W_given_X"] = r.c1.holds;
  j["C2_X_indep_W"] = r.c2.holds;
  j["A_collapsible"] = r.a_collapsible.holds;
  j["binary_w"] = r.binary_w;
  j["sufficiency_consistent"] = r.sufficiency_consistent;
  j["necessity_consistent"] = r.necessity_consistent ? Json(*r.necessity_consistent) : Json(nullptr);
  j["status"] = r.status;
  j["applicable"] = true;
  j["holds"] = r.sufficiency_consistent && r.necessity_consistent.value_or(true);
  return j;
}

Json to_json(const CochranDecomposition& d) {
  return {{"beta_yx", d.beta_yx},
          {"beta_yx_w", d.beta_yx_w},
          {"beta_yw_x", d.beta_yw_x},
          {"beta_wx", d.beta_wx},
          {"residual", d.residual}};
}

Json to_json(const BatchReport& r) {
  Json j;
  j["suite"] = to_string(r.suite);
  j["seed"] = r.seed;
  j["count"] = r.count;
  j["passed"] = r.passed;
  j["failed"] = r.failed;
  j["vacuous"] = r.vacuous;
  Json cov = Json::object();
  for (const auto& [k, v] : r.coverage) cov[k] = v;
  j["coverage"] = cov;
  j["first_counterexample"] = r.first_counterexample ? Json(*r.first_counterexample) : Json(nullptr);
  j["notes"] = r.notes;
  return j;
}

Json to_json(const EvalGrid& g) { return {{"y", g.ys}, {"x", g.xs}, {"w", g.ws}}; }

namespace {
Json numbers(const std::vector<double>& v) {
  Json a = Json::array();
  for (double d : v) a.push_back(number_or_null(d));
  return a;
}
}  // namespace

Json to_json(const DependenceField& f) {
  Json j;
  j["kind"] = to_string(f.kind);
  j["scope"] = to_string(f.scope);
  j["layout"] = f.scope == DepScope::conditional ? "[y][x][w]" : "[y][x]";
  j["values"] = numbers(f.values);
  Json m = Json::array();
  for (auto x : f.methods) m.push_back(to_string(x));
  j["methods"] = m;
  j["notes"] = f.notes;
  return j;
}

Json to_json(const QuantileProfile& p) {
  return {{"grid", to_json(p.grid)},
          {"q_x_marginal", {{"layout", "[y][x]"}, {"values", numbers(p.q_x_marginal)}}},
          {"q_x_conditional", {{"layout", "[y][x][w]"}, {"values", numbers(p.q_x_cond)}}},
          {"q_w_conditional", {{"layout", "[y][x][w]"}, {"values", numbers(p.q_w_cond)}}},
          {"q_x_w", {{"layout", "[x][w]"}, {"values", numbers(p.q_x_w)}}},
          {"delta", {{"layout", "[y][x][w]"}, {"values", numbers(p.delta)}}}};
}

Json model_json(const ContinuousModel& m) {
  Json params = Json::object();
  for (const auto& [k, v] : m.parameters()) params[k] = v;
  return {{"family", m.family()},
          {"parameters", params},
          {"clamped", m.clamped()},
          {"complete", m.posterior_complete()}};
}

std::string csv_summary(const Json& report) {
  std::ostringstream s;
  s << "property,applicable,holds,max_violation,tolerance\n";
  if (!report.contains("checks")) return s.str();
  auto field = [](const Json& c, const char* key) -> std::string {
    if (!c.contains(key) || c[key].is_null()) return "";
    if (c[key].is_boolean()) return c[key].get<bool>() ? "true" : "false";
    return c[key].dump();
  };
  for (const auto& c : report["checks"]) {
    s << c.value("property", "?") << ',' << (c.contains("error") ? "false" : field(c, "applicable")) << ','
      << field(c, "holds") << ',' << field(c, "max_violation") << ',' << field(c, "tolerance") << '\n';
  }
  return s.str();
}

}  // namespace collapse::cli
