#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "collapse/batch.hpp"
#include "collapse/cochran.hpp"
#include "collapse/collapse.hpp"
#include "collapse/error.hpp"
#include "collapse/quantile.hpp"
#include "report.hpp"

namespace collapse::cli {

namespace {

using Clock = std::chrono::steady_clock;

struct Settings {
  RunConfig config;
  std::vector<std::string> checks;
  std::map<std::string, double> tolerances;
  std::string format = "json";
  std::optional<std::string> out;
  Execution exec = Execution::parallel;
  bool emit_fields = false;
};

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError(what + ": not a number: '" + s + "'");
  }
}

Settings settle(const Options& opts, const std::vector<std::string>& allowed) {
  Settings s;
  if (opts.config) s.config = parse_run_config(read_file(*opts.config));
  s.checks = !opts.checks.empty() ? opts.checks : s.config.checks;
  if (s.checks.empty()) s.checks = allowed;
  for (const auto& c : s.checks)
    if (std::find(allowed.begin(), allowed.end(), c) == allowed.end())
      throw InputError("check '" + c + "' is not available for this input kind");
  s.tolerances = s.config.tolerances;
  for (const auto& t : opts.tolerances) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw InputError("--tol expects check=value, got '" + t + "'");
    s.tolerances[t.substr(0, eq)] = parse_number(t.substr(eq + 1), "--tol " + t.substr(0, eq));
  }
  for (const auto& [name, value] : s.tolerances) {
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
      throw InputError("tolerance for unknown check '" + name + "'");
    if (!(value > 0)) throw InputError("tolerance for '" + name + "' must be positive");
  }
  s.format = opts.format.value_or(s.config.format.value_or("json"));
  if (s.format != "json" && s.format != "csv-summary")
    throw InputError("unknown format '" + s.format + "' (expected json or csv-summary)");
  s.out = opts.out ? opts.out : s.config.out;
  s.exec = opts.serial ? Execution::serial : Execution::parallel;
  s.emit_fields = opts.emit_fields || s.config.emit_fields.value_or(false);
  return s;
}

bool wants(const Settings& s, const std::string& check) {
  return std::find(s.checks.begin(), s.checks.end(), check) != s.checks.end();
}

void finish(Outcome& out, const Settings& s, Clock::time_point start) {
  out.format = s.format;
  out.out = s.out;
  out.report["timing"] = {{"elapsed_seconds", std::chrono::duration<double>(Clock::now() - start).count()}};
}

// Runs one check; domain and numerical failures are recorded in place of a
// verdict. Numerical failures make the run exit with code 2.
void guarded(Json& checks, int& exit_code, const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const NumericalError& e) {
    checks.push_back({{"property", name},
                      {"error", "numerical"},
                      {"message", e.what()},
                      {"estimate", number_or_null(e.estimate())},
                      {"error_bound", number_or_null(e.error_bound())}});
    exit_code = 2;
  } catch (const DomainError& e) {
    checks.push_back({{"property", name}, {"error", "domain"}, {"message", e.what()}});
  }
}

Json exact_entry(const std::optional<Rational>& v) {
  if (!v) return {{"exact", nullptr}, {"decimal", nullptr}};
  return {{"exact", to_string(*v)}, {"decimal", to_double(*v)}};
}

Json discrete_dependence_json(const DiscreteJoint& j) {
  const auto d = discrete_dependence(j);
  Json cond = Json::array(), marg = Json::array();
  for (std::size_t y = 0; y < d.ny; ++y) {
    for (std::size_t i = 0; i < d.ni; ++i) {
      const Json base = {{"y", j.levels_y()[y]}, {"x_from", j.levels_x()[i]}, {"x_to", j.levels_x()[i + 1]}};
      for (std::size_t w = 0; w < d.nw; ++w) {
        Json e = base;
        e["w"] = j.levels_w()[w];
        e.update(exact_entry(d.cond(y, i, w)));
        cond.push_back(e);
      }
      Json e = base;
      e.update(exact_entry(d.marg(y, i)));
      marg.push_back(e);
    }
  }
  return {{"conditional", cond}, {"marginal", marg}, {"notes", d.notes}};
}

LevelOrdering ordering(const Options& opts, const RunConfig& cfg) {
  LevelOrdering o = cfg.levels;
  const std::string order = opts.order.value_or(cfg.order.value_or("numeric"));
  if (order == "numeric")
    o.order = LevelOrder::numeric_lexicographic;
  else if (order == "appearance")
    o.order = LevelOrder::first_appearance;
  else
    throw InputError("unknown level order '" + order + "' (expected numeric or appearance)");
  return o;
}

// Evaluates f at every grid (y, x) and folds the results into a tracker.
template <class F>
Verdict over_yx(const ContinuousModel& model, const CheckContext& ctx, ViolationTracker t, bool interior_only,
                F&& f) {
  const auto& g = ctx.grid;
  struct Slot {
    std::optional<std::pair<double, Witness>> value;
    std::string skip;
  };
  auto slots = evaluate_indexed<Slot>(
      g.ys.size() * g.xs.size(),
      [&](std::size_t k) {
        const double y = g.ys[k / g.xs.size()], x = g.xs[k % g.xs.size()];
        Slot s;
        if (interior_only && !quantile_interior(model, y, x, ctx.numeric)) {
          s.skip = "outside the quantile interior";
          return s;
        }
        try {
          s.value = f(y, x);
        } catch (const DomainError& e) {
          s.skip = e.what();
        }
        return s;
      },
      ctx.exec);
  for (auto& s : slots) {
    if (s.value)
      t.observe(s.value->first, [&] { return s.value->second; });
    else
      t.skip(s.skip);
  }
  return t.finish();
}

}  // namespace

Outcome cmd_table(const std::string& csv_path, const Options& opts) {
  const auto start = Clock::now();
  const Settings s = settle(opts, table_checks());
  const std::string bytes = read_file(csv_path);
  const auto rows = parse_table_csv(bytes);
  const LevelOrdering order = ordering(opts, s.config);
  const auto joint = DiscreteJoint::build(rows, order);

  Outcome out;
  Json& r = out.report = report_header("table", csv_path, bytes);
  r["input"]["kind"] = "table";
  r["input"]["dimensions"] = {{"y", joint.ny()}, {"x", joint.nx()}, {"w", joint.nw()}};
  r["input"]["levels"] = {{"y", joint.levels_y()}, {"x", joint.levels_x()}, {"w", joint.levels_w()}};
  r["input"]["total"] = to_string(joint.total());
  r["config"] = {{"checks", s.checks},
                 {"order", order.order == LevelOrder::first_appearance ? "appearance" : "numeric"},
                 {"arithmetic", "exact rational"}};

  Json checks = Json::array();
  Json summary = Json::object();
  auto add = [&](const Verdict& v, const char* key) {
    checks.push_back(to_json(v));
    if (v.applicable) summary[key] = v.property == "no_reversal" ? !v.holds : v.holds;
  };
  for (const auto& c : s.checks) {
    guarded(checks, out.exit_code, c, [&] {
      if (c == "homogeneity") {
        add(check_homogeneity(joint), "homogeneous");
      } else if (c == "collapsibility") {
        add(check_collapsibility(joint), "collapsible");
      } else if (c == "uniform_collapsibility") {
        add(check_uniform_collapsibility(joint), "uniformly_collapsible");
      } else if (c == "A_collapsibility") {
        add(check_A_collapsibility(joint), "A_collapsible");
      } else if (c == "independence") {
        add(check_independence(joint, Independence::y_w_given_x), "Y_indep_W_given_X");
        add(check_independence(joint, Independence::x_w), "X_indep_W");
      } else if (c == "sufficiency_necessity") {
        checks.push_back(to_json(sufficiency_necessity(joint)));
      } else if (c == "reversal") {
        add(detect_reversal(joint), "reversal");
      }
    });
  }
  r["checks"] = checks;
  r["summary"] = summary;
  r["values"] = {{"dependence", discrete_dependence_json(joint)}};
  if (wants(s, "sufficiency_necessity") || wants(s, "homogeneity"))
    r["values"]["class_membership"] = to_json(class_membership(joint));
  finish(out, s, start);
  return out;
}

Outcome cmd_model(const std::string& config_path, const Options& opts) {
  const auto start = Clock::now();
  const Settings s = settle(opts, model_checks());
  const std::string bytes = read_file(config_path);
  const auto cfg = parse_model_config(bytes);
  const ContinuousModel& model = *cfg.model;

  NumericOptions numeric;
  CheckContext base;
  base.numeric = numeric;
  base.exec = s.exec;
  if (opts.grid)
    base.grid = resolve_grid(*opts.grid, model, numeric);
  else if (cfg.evaluation)
    base.grid = *cfg.evaluation;
  else if (s.config.grid_inline)
    base.grid = parse_grid(*s.config.grid_inline);
  else
    base.grid = resolve_grid(s.config.grid.value_or("auto"), model, numeric);
  base.grid.validate(model);

  const double default_tol = default_tolerance(model);
  std::map<std::string, double> used;
  auto context = [&](const std::string& check, double fallback) {
    CheckContext c = base;
    const auto it = s.tolerances.find(check);
    c.tolerance = it != s.tolerances.end() ? it->second : fallback;
    used[check] = c.tolerance;
    return c;
  };

  Outcome out;
  Json& r = out.report = report_header("model", config_path, bytes);
  r["input"]["kind"] = "model";
  r["input"]["model"] = model_json(model);
  r["input"]["dimensions"] = {{"y", base.grid.ys.size()}, {"x", base.grid.xs.size()}, {"w", base.grid.ws.size()}};

  Json checks = Json::array();
  Json summary = Json::object();
  Json values = Json::object();
  Json fields = Json::object();
  auto add = [&](const Verdict& v, const char* key) {
    checks.push_back(to_json(v));
    if (v.applicable && key) summary[key] = v.property == "no_reversal" ? !v.holds : v.holds;
  };

  std::optional<DependenceField> cond, marg;
  auto distribution_fields = [&] {
    if (!cond) {
      cond = dependence_field(model, base.grid, DepKind::distribution, DepScope::conditional, numeric, s.exec);
      marg = dependence_field(model, base.grid, DepKind::distribution, DepScope::marginal, numeric, s.exec);
    }
  };

  for (const auto& c : s.checks) {
    guarded(checks, out.exit_code, c, [&] {
      if (c == "decomposition") {
        const auto ctx = context(c, default_tol);
        ViolationTracker t("decomposition", ctx.tolerance,
                           "F_x(y|x) against int F_x(y|x,w) f(w|x) dw + int F(y|x,w) f_x(w|x) dw");
        add(over_yx(model, ctx, t, false,
                    [&](double y, double x) {
                      const auto d = decomposition_terms(model, y, x, numeric);
                      const double lhs = dist_dep(model, y, x, std::nullopt, numeric).value;
                      Witness w{{{"y", y}, {"x", x}},
                                {},
                                {{"marginal", lhs}, {"term_avg", d.term_avg}, {"term_residual", d.term_residual}}};
                      return std::pair{std::abs(lhs - d.term_avg - d.term_residual), w};
                    }),
            nullptr);
      } else if (c == "homogeneity") {
        distribution_fields();
        add(check_homogeneity(*cond, context(c, default_tol).tolerance), "homogeneous");
      } else if (c == "collapsibility") {
        distribution_fields();
        add(check_collapsibility(*cond, *marg, context(c, default_tol).tolerance), "collapsible");
      } else if (c == "A_collapsibility") {
        const auto a = check_A_collapsibility(model, context(c, default_tol));
        add(a.verdict, "A_collapsible");
        values["max_residual_integral"] = a.max_residual;
      } else if (c == "residual_integral") {
        add(check_residual(model, context(c, default_tol)), nullptr);
      } else if (c == "density_A_collapsibility") {
        add(check_density_A_collapsibility(model, context(c, default_tol)), "density_A_collapsible");
      } else if (c == "independence") {
        const auto ctx = context(c, default_tol);
        add(check_independence(model, Independence::y_w_given_x, ctx), "Y_indep_W_given_X");
        add(check_independence(model, Independence::x_w, ctx), "X_indep_W");
      } else if (c == "sufficiency_necessity") {
        checks.push_back(to_json(sufficiency_necessity(model, context(c, default_tol))));
      } else if (c == "reversal") {
        distribution_fields();
        add(detect_reversal(*cond, *marg, context(c, default_tol).tolerance), "reversal");
      } else if (c == "quantile_A_collapsibility") {
        const auto q = check_A_collapsibility_quantile(model, context(c, default_tol));
        add(q.verdict, "quantile_A_collapsible");
        values["max_product_form"] = q.max_product_form;
        values["max_form_gap"] = q.max_form_gap;
      } else if (c == "criterion_integral") {
        add(check_criterion(model, context(c, default_tol)), "criterion_vanishes");
      } else if (c == "cox_identity") {
        const auto ctx = context(c, 1e-5);
        ViolationTracker t("cox_identity", ctx.tolerance, "q_x(y|x) against E_{W|y,x} delta(y|x,W) by quadrature");
        add(over_yx(model, ctx, t, true,
                    [&](double y, double x) {
                      const auto p = posterior_terms(model, y, x, numeric);
                      Witness w{{{"y", y}, {"x", x}},
                                {},
                                {{"q_x_marginal", p.q_x_marginal}, {"expected_delta", p.expected_delta()}}};
                      return std::pair{std::abs(p.cox_residual()), w};
                    }),
            "cox_identity");
      } else if (c == "quantile_equals_total_effect") {
        add(check_delta_w_free(model, context(c, default_tol)), nullptr);
      } else if (c == "product_vanishes") {
        add(check_product_vanishes(model, context(c, default_tol)), nullptr);
      }
    });
  }

  if (s.emit_fields) {
    guarded(checks, out.exit_code, "fields", [&] {
      distribution_fields();
      fields["grid"] = to_json(base.grid);
      fields["distribution_conditional"] = to_json(*cond);
      fields["distribution_marginal"] = to_json(*marg);
      fields["quantile"] = to_json(quantile_profile(model, base.grid, numeric, s.exec));
    });
  }

  Json tol = Json::object();
  for (const auto& c : s.checks)
    if (used.count(c)) tol[c] = used[c];
  r["config"] = {{"checks", s.checks},
                 {"grid", to_json(base.grid)},
                 {"tolerances", tol},
                 {"execution", s.exec == Execution::serial ? "serial" : "parallel"}};
  r["checks"] = checks;
  r["summary"] = summary;
  r["values"] = values;
  if (s.emit_fields) r["fields"] = fields;
  finish(out, s, start);
  return out;
}

Outcome cmd_cochran(const std::string& path, const Options& opts) {
  const auto start = Clock::now();
  const Settings s = settle(opts, {"cochran"});
  const std::string bytes = read_file(path);
  const auto first = bytes.find_first_not_of(" \t\r\n");
  const bool json_input = first != std::string::npos && (bytes[first] == '{' || bytes[first] == '[');

  Outcome out;
  Json& r = out.report = report_header("cochran", path, bytes);
  Cov3 cov{};
  if (json_input) {
    cov = parse_covariance_json(bytes);
    r["input"]["kind"] = "covariance";
    r["input"]["dimensions"] = {{"rows", 3}, {"columns", 3}};
  } else {
    const auto rows = parse_sample_csv(bytes);
    cov = sample_covariance(rows);
    r["input"]["kind"] = "sample";
    r["input"]["dimensions"] = {{"rows", rows.size()}, {"columns", 3}};
  }
  const auto d = cochran_decompose(cov);
  const double tol = s.tolerances.count("cochran") ? s.tolerances.at("cochran") : 1e-10;
  r["config"] = {{"checks", {"cochran"}}, {"tolerances", {{"cochran", tol}}}};
  Verdict v;
  v.property = "cochran_identity";
  v.tolerance = tol;
  v.max_violation = std::abs(d.residual);
  v.holds = v.max_violation <= tol;
  v.method = "least-squares slopes from the covariance matrix";
  if (!v.holds)
    v.witness = Witness{{},
                        {},
                        {{"beta_yx", d.beta_yx},
                         {"beta_yx_w_plus_product", d.beta_yx_w + d.beta_yw_x * d.beta_wx}}};
  r["checks"] = Json::array({to_json(v)});
  r["summary"] = {{"identity_holds", v.holds}};
  r["values"] = to_json(d);
  Json m = Json::array();
  for (const auto& row : cov) m.push_back(Json::array({row[0], row[1], row[2]}));
  r["values"]["covariance"] = m;
  finish(out, s, start);
  return out;
}

Outcome cmd_batch(const BatchArgs& args, const Options& opts) {
  const auto start = Clock::now();
  const Settings s = settle(opts, {"batch"});
  BatchOptions b;
  const auto seed = args.seed ? args.seed : s.config.seed;
  if (!seed) throw InputError("batch runs need --seed");
  b.seed = *seed;
  b.count = args.count.value_or(s.config.count.value_or(100));
  b.exec = s.exec;
  if (s.tolerances.count("batch")) b.tolerance = s.tolerances.at("batch");
  const auto suite_name = args.suite ? args.suite : s.config.suite;
  if (!suite_name) throw InputError("batch runs need --suite");
  const Suite suite = parse_suite(*suite_name);
  const auto rep = run_batch(suite, b);

  Outcome out;
  std::ostringstream key;
  key << "suite=" << to_string(suite) << ";seed=" << b.seed << ";count=" << b.count;
  Json& r = out.report = report_header("batch", "", key.str());
  r["input"]["kind"] = "generated";
  r["input"]["dimensions"] = {{"cases", b.count}};
  r["config"] = {{"suite", to_string(suite)}, {"seed", b.seed}, {"count", b.count}, {"tolerance", b.tolerance}};
  Json batch = to_json(rep);
  Json v = {{"property", std::string("batch_") + to_string(suite)},
            {"applicable", true},
            {"holds", rep.failed == 0},
            {"max_violation", static_cast<double>(rep.failed)},
            {"tolerance", 0.0}};
  r["checks"] = Json::array({v});
  r["summary"] = {{"all_passed", rep.failed == 0}, {"coverage_shortfall", !rep.notes.empty()}};
  r["values"] = batch;
  finish(out, s, start);
  return out;
}

void emit(const Outcome& outcome) {
  const std::string text =
      outcome.format == "csv-summary" ? csv_summary(outcome.report) : outcome.report.dump(2) + "\n";
  if (outcome.out) {
    std::ofstream f(*outcome.out, std::ios::binary);
    if (!f) throw InputError("cannot write '" + *outcome.out + "'");
    f << text;
  } else {
    std::cout << text;
  }
}

}  // namespace collapse::cli
