#include "collapse/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "collapse/error.hpp"
#include "grid_eval.hpp"

namespace collapse {

const char* to_string(Independence which) { return which == Independence::y_w_given_x ? "Y_indep_W_given_X" : "X_indep_W"; }

double default_tolerance(const ContinuousModel& model) { return model.clamped() ? 1e-3 : 1e-6; }

std::vector<std::string> lattice_violations(const ClassMembership& m) {
  std::vector<std::string> out;
  if (m.in_C_W && !m.in_C_H) out.push_back("collapsible but not homogeneous");
  if (m.in_C_W && !m.in_C_A) out.push_back("collapsible but not A-collapsible");
  if (m.in_C_H && m.in_C_A && !m.in_C_W) out.push_back("homogeneous and A-collapsible but not collapsible");
  return out;
}

namespace {

constexpr const char* kExact = "exact rational arithmetic";

Witness cells(const DiscreteJoint& j, std::size_t y, std::size_t i) {
  Witness w;
  w.cells = {{"y", j.levels_y()[y]}, {"x", j.levels_x()[i]}, {"x_next", j.levels_x()[i + 1]}};
  return w;
}

std::string field_method(const DependenceField& f) {
  std::set<std::string> seen;
  std::string out;
  for (auto m : f.methods) {
    if (m == DepMethod::undefined || !seen.insert(to_string(m)).second) continue;
    if (!out.empty()) out += ", ";
    out += to_string(m);
  }
  return std::string(to_string(f.kind)) + " dependence: " + (out.empty() ? "none" : out);
}

void note_field(ViolationTracker& t, const DependenceField& f) {
  for (const auto& n : f.notes) t.note(n);
}

// Sign of a dependence value; values within tol of zero count as zero.
struct Signed {
  int sign = 0;
  double magnitude = 0.0;
  std::function<Witness()> witness;
};

Verdict reversal_verdict(const std::vector<Signed>& cond, const std::vector<Signed>& marg, ViolationTracker tracker) {
  bool pos = false, neg = false;
  for (const auto& c : cond) {
    pos |= c.sign > 0;
    neg |= c.sign < 0;
  }
  if (pos && neg) {
    Verdict v = tracker.finish();
    v.applicable = false;
    v.notes = {"no uniform conditional direction: conditional dependence takes both signs"};
    return v;
  }
  if (!pos && !neg) {
    tracker.note("conditional dependence vanishes everywhere; no direction to reverse");
    for (const auto& m : marg) tracker.observe(0.0, m.witness);
    return tracker.finish();
  }
  const int direction = pos ? 1 : -1;
  // Strongest conditional point in the common direction, reported alongside
  // the marginal witness.
  const Signed* strongest = nullptr;
  for (const auto& c : cond)
    if (c.sign == direction && (!strongest || c.magnitude > strongest->magnitude)) strongest = &c;
  tracker.note(direction > 0 ? "conditional dependence >= 0 everywhere" : "conditional dependence <= 0 everywhere");
  for (const auto& m : marg) {
    const double v = m.sign == -direction ? m.magnitude : 0.0;
    tracker.observe(v, [&] {
      Witness w = m.witness();
      Witness c = strongest->witness();
      for (auto& p : c.point) w.point.emplace_back("conditional_" + p.first, p.second);
      for (auto& p : c.cells) w.cells.emplace_back("conditional_" + p.first, p.second);
      for (auto& p : c.values) w.values.emplace_back(p);
      return w;
    });
  }
  return tracker.finish();
}

}  // namespace

// ---------------------------------------------------------------------------
// Discrete

Verdict check_homogeneity(const DiscreteJoint& joint) {
  if (joint.nw() < 2) throw InputError("homogeneity undefined: W has a single level");
  const auto d = discrete_dependence(joint);
  auto t = ViolationTracker::exact("homogeneity", kExact);
  for (const auto& n : d.notes) t.note(n);
  for (std::size_t y = 0; y < d.ny; ++y)
    for (std::size_t i = 0; i < d.ni; ++i)
      for (std::size_t a = 0; a < d.nw; ++a)
        for (std::size_t b = a + 1; b < d.nw; ++b) {
          const auto& da = d.cond(y, i, a);
          const auto& db = d.cond(y, i, b);
          if (!da || !db) {
            t.skip("dependence undefined at an empty cell");
            continue;
          }
          t.observe(Rational(abs(Rational(*da - *db))), [&] {
            Witness w = cells(joint, y, i);
            w.cells.emplace_back("w", joint.levels_w()[a]);
            w.cells.emplace_back("w_other", joint.levels_w()[b]);
            w.values = {{"dependence_w", to_double(*da)}, {"dependence_w_other", to_double(*db)}};
            return w;
          });
        }
  return t.finish();
}

Verdict check_collapsibility(const DiscreteJoint& joint) {
  const auto d = discrete_dependence(joint);
  auto t = ViolationTracker::exact("collapsibility", kExact);
  for (const auto& n : d.notes) t.note(n);
  for (std::size_t y = 0; y < d.ny; ++y)
    for (std::size_t i = 0; i < d.ni; ++i)
      for (std::size_t w = 0; w < d.nw; ++w) {
        const auto& c = d.cond(y, i, w);
        const auto& m = d.marg(y, i);
        if (!c || !m) {
          t.skip("dependence undefined at an empty cell");
          continue;
        }
        t.observe(Rational(abs(Rational(*c - *m))), [&] {
          Witness wit = cells(joint, y, i);
          wit.cells.emplace_back("w", joint.levels_w()[w]);
          wit.values = {{"conditional", to_double(*c)}, {"marginal", to_double(*m)}};
          return wit;
        });
      }
  return t.finish();
}

Verdict check_uniform_collapsibility(const DiscreteJoint& joint) {
  if (joint.nw() < 2) throw InputError("uniform collapsibility needs an ordinal W with at least 2 levels");
  const auto d = discrete_dependence(joint);
  auto t = ViolationTracker::exact("uniform_collapsibility", kExact);
  std::size_t skipped_sets = 0;
  for (std::size_t a = 0; a < joint.nw(); ++a) {
    for (std::size_t b = a; b < joint.nw(); ++b) {
      std::vector<std::size_t> levels;
      for (std::size_t k = a; k <= b; ++k) levels.push_back(k);
      const auto cond = WCondition::set(levels);
      bool set_skipped = false;
      for (std::size_t y = 0; y < d.ny; ++y)
        for (std::size_t i = 0; i < d.ni; ++i) {
          const auto& m = d.marg(y, i);
          std::optional<Rational> dep;
          try {
            dep = dist_dep_discrete(joint, y, i, cond);
          } catch (const DomainError& e) {
            if (!set_skipped) t.note(std::string("set skipped: ") + e.what());
            set_skipped = true;
            continue;
          }
          if (!m) continue;
          t.observe(Rational(abs(Rational(*dep - *m))), [&] {
            Witness w = cells(joint, y, i);
            w.cells.emplace_back("w_set", joint.describe_w(cond));
            w.values = {{"conditional", to_double(*dep)}, {"marginal", to_double(*m)}};
            return w;
          });
        }
      skipped_sets += set_skipped;
    }
  }
  if (skipped_sets) t.note(std::to_string(skipped_sets) + " W interval(s) had a zero-mass cell");
  return t.finish();
}

Verdict check_A_collapsibility(const DiscreteJoint& joint) {
  const auto d = discrete_dependence(joint);
  auto t = ViolationTracker::exact("A_collapsibility", std::string(kExact) + "; weights P(w | X = lower level)");
  for (std::size_t y = 0; y < d.ny; ++y)
    for (std::size_t i = 0; i < d.ni; ++i) {
      const auto& m = d.marg(y, i);
      if (!m) {
        t.skip("marginal dependence undefined");
        continue;
      }
      Rational expectation = 0;
      bool defined = true;
      for (std::size_t w = 0; w < d.nw; ++w) {
        const Rational p = joint.prob_w_given_x(w, i);
        if (p == 0) continue;
        const auto& c = d.cond(y, i, w);
        if (!c) {
          defined = false;
          break;
        }
        expectation += p * *c;
      }
      if (!defined) {
        t.skip("conditional dependence undefined at a W level with positive weight");
        continue;
      }
      t.observe(Rational(abs(Rational(expectation - *m))), [&] {
        Witness w = cells(joint, y, i);
        w.values = {{"expected_conditional", to_double(expectation)}, {"marginal", to_double(*m)}};
        return w;
      });
    }
  return t.finish();
}

Verdict check_independence(const DiscreteJoint& joint, Independence which) {
  auto t = ViolationTracker::exact(to_string(which), kExact);
  if (which == Independence::y_w_given_x) {
    for (std::size_t x = 0; x < joint.nx(); ++x) {
      if (joint.mass(x, WCondition::marginal()) == 0) {
        t.skip("X level with zero mass");
        continue;
      }
      for (std::size_t y = 0; y + 1 < joint.ny(); ++y) {
        const Rational fm = joint.cdf(y, x, WCondition::marginal());
        for (std::size_t w = 0; w < joint.nw(); ++w) {
          if (joint.mass(x, WCondition::level(w)) == 0) {
            t.skip("empty (x, w) cell");
            continue;
          }
          const Rational fc = joint.cdf(y, x, WCondition::level(w));
          t.observe(Rational(abs(Rational(fc - fm))), [&] {
            Witness wit;
            wit.cells = {{"y", joint.levels_y()[y]}, {"x", joint.levels_x()[x]}, {"w", joint.levels_w()[w]}};
            wit.values = {{"F(y|x,w)", to_double(fc)}, {"F(y|x)", to_double(fm)}};
            return wit;
          });
        }
      }
    }
  } else {
    for (std::size_t x = 0; x < joint.nx(); ++x) {
      if (joint.mass(x, WCondition::marginal()) == 0) {
        t.skip("X level with zero mass");
        continue;
      }
      for (std::size_t w = 0; w < joint.nw(); ++w) {
        const Rational pc = joint.prob_w_given_x(w, x);
        const Rational pm = joint.prob_w(w);
        t.observe(Rational(abs(Rational(pc - pm))), [&] {
          Witness wit;
          wit.cells = {{"x", joint.levels_x()[x]}, {"w", joint.levels_w()[w]}};
          wit.values = {{"P(w|x)", to_double(pc)}, {"P(w)", to_double(pm)}};
          return wit;
        });
      }
    }
  }
  return t.finish();
}

Verdict detect_reversal(const DiscreteJoint& joint) {
  const auto d = discrete_dependence(joint);
  auto sgn = [](const Rational& q) { return q > 0 ? 1 : (q < 0 ? -1 : 0); };
  std::vector<Signed> cond, marg;
  for (std::size_t y = 0; y < d.ny; ++y)
    for (std::size_t i = 0; i < d.ni; ++i) {
      for (std::size_t w = 0; w < d.nw; ++w) {
        const auto& c = d.cond(y, i, w);
        if (!c) continue;
        const double v = to_double(*c);
        cond.push_back({sgn(*c), std::abs(v), [&joint, y, i, w, v] {
                          Witness wit = cells(joint, y, i);
                          wit.cells.emplace_back("w", joint.levels_w()[w]);
                          wit.values = {{"conditional", v}};
                          return wit;
                        }});
      }
      if (const auto& m = d.marg(y, i)) {
        const double v = to_double(*m);
        marg.push_back({sgn(*m), std::abs(v), [&joint, y, i, v] {
                          Witness wit = cells(joint, y, i);
                          wit.values = {{"marginal", v}};
                          return wit;
                        }});
      }
    }
  // Signs are exact, so a zero tolerance reproduces the strict comparison.
  return reversal_verdict(cond, marg, ViolationTracker("no_reversal", 0.0, kExact));
}

namespace {

SufficiencyNecessity combine(Verdict c1, Verdict c2, Verdict a, bool binary_w) {
  SufficiencyNecessity r;
  r.binary_w = binary_w;
  const bool condition = c1.holds || c2.holds;
  r.sufficiency_consistent = !condition || a.holds;
  std::string status;
  if (!r.sufficiency_consistent) {
    status = "inconsistent: a sufficient condition holds but A-collapsibility fails";
  } else if (binary_w) {
    r.necessity_consistent = !a.holds || condition;
    status = *r.necessity_consistent ? "consistent"
                                     : "necessity fails: A-collapsible with neither condition (discrete X)";
  } else {
    status = "sufficiency consistent; necessity does not apply: W not binary";
  }
  r.status = status;
  r.c1 = std::move(c1);
  r.c2 = std::move(c2);
  r.a_collapsible = std::move(a);
  return r;
}

}  // namespace

SufficiencyNecessity sufficiency_necessity(const DiscreteJoint& joint) {
  return combine(check_independence(joint, Independence::y_w_given_x), check_independence(joint, Independence::x_w),
                 check_A_collapsibility(joint), joint.nw() == 2);
}

ClassMembership class_membership(const DiscreteJoint& joint) {
  ClassMembership m;
  m.in_C_H = joint.nw() < 2 || check_homogeneity(joint).holds;
  m.in_C_W = check_collapsibility(joint).holds;
  m.in_C_A = check_A_collapsibility(joint).holds;
  m.in_C1 = check_independence(joint, Independence::y_w_given_x).holds;
  m.in_C2 = check_independence(joint, Independence::x_w).holds;
  return m;
}

// ---------------------------------------------------------------------------
// Continuous

Verdict check_homogeneity(const DependenceField& f, double tolerance) {
  if (f.scope != DepScope::conditional) throw InputError("homogeneity needs a conditional dependence field");
  if (f.grid.ws.size() < 2) throw InputError("homogeneity undefined: fewer than 2 W points");
  ViolationTracker t("homogeneity", tolerance, field_method(f));
  note_field(t, f);
  for (std::size_t iy = 0; iy < f.grid.ys.size(); ++iy)
    for (std::size_t ix = 0; ix < f.grid.xs.size(); ++ix) {
      std::size_t lo = 0, hi = 0;
      bool any = false;
      for (std::size_t iw = 0; iw < f.grid.ws.size(); ++iw) {
        const double v = f.at(iy, ix, iw);
        if (std::isnan(v)) continue;
        if (!any) {
          lo = hi = iw;
          any = true;
        }
        if (v < f.at(iy, ix, lo)) lo = iw;
        if (v > f.at(iy, ix, hi)) hi = iw;
      }
      if (!any) continue;
      t.observe(f.at(iy, ix, hi) - f.at(iy, ix, lo), [&] {
        Witness w;
        w.point = {{"y", f.grid.ys[iy]}, {"x", f.grid.xs[ix]}, {"w", f.grid.ws[lo]}, {"w_other", f.grid.ws[hi]}};
        w.values = {{"dependence_w", f.at(iy, ix, lo)}, {"dependence_w_other", f.at(iy, ix, hi)}};
        return w;
      });
    }
  return t.finish();
}

Verdict check_collapsibility(const DependenceField& c, const DependenceField& m, double tolerance) {
  if (c.scope != DepScope::conditional || m.scope != DepScope::marginal)
    throw InputError("collapsibility needs a conditional and a marginal field");
  if (c.grid.ys != m.grid.ys || c.grid.xs != m.grid.xs) throw InputError("fields live on different grids");
  ViolationTracker t("collapsibility", tolerance, field_method(c) + "; " + field_method(m));
  note_field(t, c);
  note_field(t, m);
  for (std::size_t iy = 0; iy < c.grid.ys.size(); ++iy)
    for (std::size_t ix = 0; ix < c.grid.xs.size(); ++ix)
      for (std::size_t iw = 0; iw < c.grid.ws.size(); ++iw) {
        const double cv = c.at(iy, ix, iw), mv = m.at(iy, ix);
        t.observe(std::abs(cv - mv), [&] {
          Witness w;
          w.point = {{"y", c.grid.ys[iy]}, {"x", c.grid.xs[ix]}, {"w", c.grid.ws[iw]}};
          w.values = {{"conditional", cv}, {"marginal", mv}};
          return w;
        });
      }
  return t.finish();
}

Verdict detect_reversal(const DependenceField& c, const DependenceField& m, double tolerance) {
  auto sgn = [tolerance](double v) { return v > tolerance ? 1 : (v < -tolerance ? -1 : 0); };
  std::vector<Signed> cond, marg;
  for (std::size_t iy = 0; iy < c.grid.ys.size(); ++iy)
    for (std::size_t ix = 0; ix < c.grid.xs.size(); ++ix) {
      const double y = c.grid.ys[iy], x = c.grid.xs[ix];
      for (std::size_t iw = 0; iw < c.grid.ws.size(); ++iw) {
        const double v = c.at(iy, ix, iw);
        if (std::isnan(v)) continue;
        const double w = c.grid.ws[iw];
        cond.push_back({sgn(v), std::abs(v), [=] {
                          Witness wit;
                          wit.point = {{"y", y}, {"x", x}, {"w", w}};
                          wit.values = {{"conditional", v}};
                          return wit;
                        }});
      }
      const double v = m.at(iy, ix);
      if (std::isnan(v)) continue;
      marg.push_back({sgn(v), std::abs(v), [=] {
                        Witness wit;
                        wit.point = {{"y", y}, {"x", x}};
                        wit.values = {{"marginal", v}};
                        return wit;
                      }});
    }
  return reversal_verdict(cond, marg, ViolationTracker("no_reversal", tolerance, field_method(c)));
}

double residual_integral(const ContinuousModel& model, double y, double x, const NumericOptions& opts) {
  return decomposition_terms(model, y, x, opts).term_residual;
}


ACollapsibility check_A_collapsibility(const ContinuousModel& model, const CheckContext& ctx) {
  ctx.grid.validate(model);
  struct Point {
    Decomposition terms;
    DepValue marginal;
  };
  std::vector<std::string> skips;
  auto pts = detail::over_yx<Point>(
      ctx,
      [&](double y, double x) {
        return Point{decomposition_terms(model, y, x, ctx.numeric), dist_dep(model, y, x, std::nullopt, ctx.numeric)};
      },
      skips);
  ViolationTracker t("A_collapsibility", ctx.tolerance,
                     "E_{W|x} of conditional dependence by adaptive quadrature; marginal dependence by "
                     "finite differences of the quadrature marginal");
  for (const auto& s : skips) t.skip(s);
  ACollapsibility out;
  const std::size_t nx = ctx.grid.xs.size();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (!pts[k]) continue;
    const auto& p = *pts[k];
    out.max_residual = std::max(out.max_residual, std::abs(p.terms.term_residual));
    t.observe(std::abs(p.terms.term_avg - p.marginal.value), [&] {
      Witness w;
      w.point = {{"y", ctx.grid.ys[k / nx]}, {"x", ctx.grid.xs[k % nx]}};
      w.values = {{"expected_conditional", p.terms.term_avg},
                  {"marginal", p.marginal.value},
                  {"residual_integral", p.terms.term_residual}};
      return w;
    });
  }
  out.verdict = t.finish();
  std::ostringstream n;
  n << "max |residual integral| on the grid = " << out.max_residual;
  out.verdict.notes.push_back(n.str());
  return out;
}

Verdict check_residual(const ContinuousModel& model, const CheckContext& ctx) {
  ctx.grid.validate(model);
  std::vector<std::string> skips;
  auto vals = detail::over_yx<double>(
      ctx, [&](double y, double x) { return residual_integral(model, y, x, ctx.numeric); }, skips);
  ViolationTracker t("residual_integral", ctx.tolerance, "adaptive Gauss-Kronrod quadrature over W|x");
  for (const auto& s : skips) t.skip(s);
  const std::size_t nx = ctx.grid.xs.size();
  for (std::size_t k = 0; k < vals.size(); ++k) {
    if (!vals[k]) continue;
    t.observe(std::abs(*vals[k]), [&] {
      Witness w;
      w.point = {{"y", ctx.grid.ys[k / nx]}, {"x", ctx.grid.xs[k % nx]}};
      w.values = {{"residual_integral", *vals[k]}};
      return w;
    });
  }
  return t.finish();
}

Verdict check_density_A_collapsibility(const ContinuousModel& model, const CheckContext& ctx) {
  ctx.grid.validate(model);
  struct Point {
    double expected;
    double marginal;
  };
  std::vector<std::string> skips;
  auto pts = detail::over_yx<Point>(
      ctx,
      [&](double y, double x) {
        const auto bps = w_breakpoints_within(model, y, x);
        auto r = num::integrate(
            [&](double w) { return pdf_y_dx(model, y, x, w, ctx.numeric) * model.pdf_w(w, x); },
            model.support_w(x), ctx.numeric.quadrature, bps);
        return Point{r.value, density_dep(model, y, x, std::nullopt, ctx.numeric).value};
      },
      skips);
  ViolationTracker t("density_A_collapsibility", ctx.tolerance,
                     "E_{W|x} of df(y|x,w)/dx by quadrature; df(y|x)/dx by finite differences");
  for (const auto& s : skips) t.skip(s);
  const std::size_t nx = ctx.grid.xs.size();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (!pts[k]) continue;
    t.observe(std::abs(pts[k]->expected - pts[k]->marginal), [&] {
      Witness w;
      w.point = {{"y", ctx.grid.ys[k / nx]}, {"x", ctx.grid.xs[k % nx]}};
      w.values = {{"expected_conditional", pts[k]->expected}, {"marginal", pts[k]->marginal}};
      return w;
    });
  }
  return t.finish();
}

Verdict check_independence(const ContinuousModel& model, Independence which, const CheckContext& ctx) {
  ctx.grid.validate(model);
  const auto& g = ctx.grid;
  if (which == Independence::x_w) {
    if (g.xs.size() < 2) return not_applicable(to_string(which), "needs at least 2 grid x values");
    ViolationTracker t(to_string(which), ctx.tolerance, "spread of f(w|x) over grid x at each grid w");
    for (double w : g.ws) {
      std::size_t lo = 0, hi = 0;
      std::vector<double> f(g.xs.size());
      for (std::size_t ix = 0; ix < g.xs.size(); ++ix) {
        f[ix] = model.pdf_w(w, g.xs[ix]);
        if (f[ix] < f[lo]) lo = ix;
        if (f[ix] > f[hi]) hi = ix;
      }
      t.observe(f[hi] - f[lo], [&] {
        Witness wit;
        wit.point = {{"w", w}, {"x", g.xs[lo]}, {"x_other", g.xs[hi]}};
        wit.values = {{"f(w|x)", f[lo]}, {"f(w|x_other)", f[hi]}};
        return wit;
      });
    }
    return t.finish();
  }

  std::vector<std::string> skips;
  auto marg = detail::over_yx<double>(
      ctx, [&](double y, double x) { return marginal_cdf_y(model, y, x, ctx.numeric); }, skips);
  ViolationTracker t(to_string(which), ctx.tolerance, "|F(y|x,w) - F(y|x)| with quadrature marginal");
  for (const auto& s : skips) t.skip(s);
  const std::size_t nx = g.xs.size();
  for (std::size_t k = 0; k < marg.size(); ++k) {
    if (!marg[k]) continue;
    const double y = g.ys[k / nx], x = g.xs[k % nx];
    for (double w : g.ws) {
      const double c = model.cdf_y(y, x, w);
      t.observe(std::abs(c - *marg[k]), [&] {
        Witness wit;
        wit.point = {{"y", y}, {"x", x}, {"w", w}};
        wit.values = {{"F(y|x,w)", c}, {"F(y|x)", *marg[k]}};
        return wit;
      });
    }
  }
  return t.finish();
}

SufficiencyNecessity sufficiency_necessity(const ContinuousModel& model, const CheckContext& ctx) {
  return combine(check_independence(model, Independence::y_w_given_x, ctx),
                 check_independence(model, Independence::x_w, ctx), check_A_collapsibility(model, ctx).verdict,
                 false);
}

ClassMembership class_membership(const ContinuousModel& model, const CheckContext& ctx) {
  const auto cond = dependence_field(model, ctx.grid, DepKind::distribution, DepScope::conditional, ctx.numeric,
                                     ctx.exec);
  const auto marg =
      dependence_field(model, ctx.grid, DepKind::distribution, DepScope::marginal, ctx.numeric, ctx.exec);
  ClassMembership m;
  m.in_C_H = ctx.grid.ws.size() < 2 || check_homogeneity(cond, ctx.tolerance).holds;
  m.in_C_W = check_collapsibility(cond, marg, ctx.tolerance).holds;
  m.in_C_A = check_A_collapsibility(model, ctx).verdict.holds;
  m.in_C1 = check_independence(model, Independence::y_w_given_x, ctx).holds;
  m.in_C2 = check_independence(model, Independence::x_w, ctx).holds;
  return m;
}

}  // namespace collapse
