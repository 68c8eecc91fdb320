#include "collapse/batch.hpp"

#include <cmath>
#include <sstream>
#include <variant>

#include "collapse/collapse.hpp"
#include "collapse/error.hpp"
#include "collapse/generators.hpp"
#include "collapse/quantile.hpp"

namespace collapse {

const char* to_string(Suite s) {
  switch (s) {
    case Suite::sufficiency:
      return "sufficiency";
    case Suite::necessity:
      return "necessity";
    case Suite::lattice:
      return "lattice";
    case Suite::chain:
      return "chain";
    case Suite::cox:
      return "cox";
  }
  return "?";
}

Suite parse_suite(const std::string& name) {
  for (Suite s : {Suite::sufficiency, Suite::necessity, Suite::lattice, Suite::chain, Suite::cox})
    if (name == to_string(s)) return s;
  throw InputError("unknown suite '" + name + "' (expected sufficiency, necessity, lattice, chain or cox)");
}

namespace {

constexpr std::array<Stratum, 5> kStrata = {Stratum::free, Stratum::c1, Stratum::c2, Stratum::homogeneous,
                                            Stratum::c2_homogeneous};

struct ContinuousCase {
  ModelPtr model;
  double y = 0.0, x = 0.0;  // used by the cox suite
};

struct Case {
  std::string label;
  std::variant<DiscreteJoint, ContinuousCase> subject;
};

struct Outcome {
  bool pass = true;
  bool vacuous = false;
  std::vector<std::string> coverage;
  std::string detail;
};

std::string shape_label(const DiscreteJoint& j) {
  return std::to_string(j.ny()) + "x" + std::to_string(j.nx()) + "x" + std::to_string(j.nw());
}

std::string describe_table(const DiscreteJoint& j) {
  std::ostringstream s;
  s << "counts [y][x][w] =";
  for (std::size_t y = 0; y < j.ny(); ++y)
    for (std::size_t x = 0; x < j.nx(); ++x)
      for (std::size_t w = 0; w < j.nw(); ++w) s << ' ' << j.count(y, x, w).get_str();
  return s.str();
}

std::vector<Case> generate(Suite suite, const BatchOptions& opts) {
  Rng rng(opts.seed);
  std::vector<Case> cases;
  cases.reserve(opts.count);
  for (std::size_t k = 0; k < opts.count; ++k) {
    Case c;
    switch (suite) {
      case Suite::sufficiency: {
        switch (k % 4) {
          case 0:
            c.subject = random_table(rng, Stratum::c1, random_shape(rng, false));
            c.label = "discrete c1";
            break;
          case 1:
            c.subject = random_table(rng, Stratum::c2, random_shape(rng, false));
            c.label = "discrete c2";
            break;
          case 2:
            c.subject = ContinuousCase{random_ci_yw(rng)};
            c.label = "continuous ci-yw";
            break;
          default:
            c.subject = ContinuousCase{random_indep_xw(rng)};
            c.label = "continuous indep-xw";
            break;
        }
        break;
      }
      case Suite::necessity: {
        const Stratum s = kStrata[k % kStrata.size()];
        c.subject = random_table(rng, s, random_shape(rng, true));
        c.label = std::string("discrete ") + to_string(s);
        break;
      }
      case Suite::lattice:
      case Suite::chain: {
        const Stratum s = kStrata[k % kStrata.size()];
        c.subject = random_table(rng, s, random_shape(rng, k % 2 == 0));
        c.label = std::string("discrete ") + to_string(s);
        break;
      }
      case Suite::cox: {
        ContinuousCase cc;
        switch (k % 5) {
          case 0:
            cc.model = random_ci_yw(rng);
            break;
          case 1:
            cc.model = random_indep_xw(rng);
            break;
          case 2:
            cc.model = random_linear_interaction(rng);
            break;
          case 3:
            cc.model = make_model("uniform-shift", {{"w_shift", std::uniform_real_distribution<>(-1.0, 1.0)(rng)}});
            break;
          default:
            cc.model = make_model("uniform-quadratic", {{"w_sd", std::uniform_real_distribution<>(0.5, 1.5)(rng)}});
            break;
        }
        const Interval xr = cc.model->preferred_x_range();
        cc.x = std::uniform_real_distribution<>(xr.lo, xr.hi)(rng);
        const double eta = std::uniform_real_distribution<>(0.1, 0.9)(rng);
        cc.y = quantile_function(*cc.model, eta, cc.x, std::nullopt);
        c.label = "continuous " + cc.model->family();
        c.subject = std::move(cc);
        break;
      }
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

Outcome evaluate(Suite suite, const Case& c, const BatchOptions& opts) {
  Outcome o;
  if (const auto* joint = std::get_if<DiscreteJoint>(&c.subject)) {
    const DiscreteJoint& j = *joint;
    switch (suite) {
      case Suite::sufficiency: {
        const auto a = check_A_collapsibility(j);
        o.pass = a.holds;
        if (!o.pass) o.detail = "A-collapsibility violation " + to_string(*a.exact_violation);
        break;
      }
      case Suite::necessity: {
        const auto r = sufficiency_necessity(j);
        o.vacuous = !r.a_collapsible.holds;
        if (!o.vacuous) o.coverage.push_back("premise_met");
        if (r.c1.holds) o.coverage.push_back("in_C1");
        if (r.c2.holds) o.coverage.push_back("in_C2");
        o.pass = r.necessity_consistent.value_or(true) && r.sufficiency_consistent;
        if (!o.pass) o.detail = r.status;
        break;
      }
      case Suite::lattice: {
        const auto m = class_membership(j);
        if (j.nw() == 2) o.coverage.push_back("binary_w");
        if (m.in_C_W) o.coverage.push_back("in_C_W");
        if (m.in_C_H && m.in_C_A) o.coverage.push_back("in_C_H_and_C_A");
        if (j.nw() == 2 && m.in_C_H && m.in_C_A && m.in_C_W) o.coverage.push_back("binary_w_equality_observed");
        const auto v = lattice_violations(m);
        o.pass = v.empty();
        o.vacuous = !m.in_C_W && !(m.in_C_H && m.in_C_A);
        if (!o.pass) o.detail = v.front();
        break;
      }
      case Suite::chain: {
        const bool u = check_uniform_collapsibility(j).holds;
        const bool w = check_collapsibility(j).holds;
        const bool h = check_homogeneity(j).holds;
        if (u) o.coverage.push_back("uniformly_collapsible");
        if (w) o.coverage.push_back("collapsible");
        if (h) o.coverage.push_back("homogeneous");
        o.vacuous = !u && !w;
        o.pass = (!u || w) && (!w || h);
        if (!o.pass) o.detail = !(!u || w) ? "uniformly collapsible but not collapsible" : "collapsible but not homogeneous";
        break;
      }
      case Suite::cox:
        break;
    }
    if (!o.pass) o.detail += " (" + shape_label(j) + ", " + describe_table(j) + ")";
    return o;
  }

  const auto& cc = std::get<ContinuousCase>(c.subject);
  const ContinuousModel& model = *cc.model;
  if (suite == Suite::sufficiency) {
    CheckContext ctx;
    ctx.grid = auto_grid(model, 4, 4, 3);
    ctx.tolerance = opts.tolerance;
    ctx.exec = Execution::serial;
    const auto a = check_A_collapsibility(model, ctx).verdict;
    o.pass = a.holds;
    if (!o.pass) {
      std::ostringstream s;
      s << "A-collapsibility violation " << a.max_violation << " > " << a.tolerance;
      o.detail = s.str();
    }
  } else if (suite == Suite::cox) {
    const double r = cox_identity_residual(model, cc.y, cc.x);
    o.pass = std::abs(r) < 1e-5;
    if (!o.pass) {
      std::ostringstream s;
      s << "Cox residual " << r << " at (y, x) = (" << cc.y << ", " << cc.x << ")";
      o.detail = s.str();
    }
  }
  if (!o.pass) {
    std::ostringstream s;
    s << " (" << model.family() << ":";
    for (const auto& [k, v] : model.parameters()) s << ' ' << k << '=' << v;
    o.detail += s.str() + ")";
  }
  return o;
}

}  // namespace

BatchReport run_batch(Suite suite, const BatchOptions& opts) {
  if (opts.count == 0) throw InputError("batch count must be positive");
  const auto cases = generate(suite, opts);
  struct Slot {
    Outcome outcome;
    std::string error;
  };
  auto slots = evaluate_indexed<Slot>(
      cases.size(),
      [&](std::size_t k) {
        Slot s;
        try {
          s.outcome = evaluate(suite, cases[k], opts);
        } catch (const DomainError& e) {
          s.error = e.what();
        }
        return s;
      },
      opts.exec);

  BatchReport r;
  r.suite = suite;
  r.seed = opts.seed;
  r.count = cases.size();
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const auto& s = slots[k];
    r.coverage[cases[k].label] += 1;
    if (!s.error.empty()) {
      ++r.failed;
      if (!r.first_counterexample) r.first_counterexample = "case " + std::to_string(k) + " (" + cases[k].label + "): " + s.error;
      continue;
    }
    for (const auto& key : s.outcome.coverage) r.coverage[key] += 1;
    if (s.outcome.vacuous) ++r.vacuous;
    if (s.outcome.pass) {
      ++r.passed;
    } else {
      ++r.failed;
      if (!r.first_counterexample)
        r.first_counterexample = "case " + std::to_string(k) + " (" + cases[k].label + "): " + s.outcome.detail;
    }
  }
  if (suite == Suite::necessity && r.coverage["premise_met"] == 0)
    r.notes.push_back("coverage shortfall: no generated table met the A-collapsibility premise");
  if (suite == Suite::lattice && r.coverage["binary_w_equality_observed"] == 0)
    r.notes.push_back("coverage shortfall: no binary-W table in C_H and C_A was generated");
  if (suite == Suite::chain && r.coverage["uniformly_collapsible"] == 0)
    r.notes.push_back("coverage shortfall: no uniformly collapsible table was generated");
  return r;
}

}  // namespace collapse
