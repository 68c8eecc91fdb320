#include "collapse/quantile.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "collapse/error.hpp"
#include "grid_eval.hpp"

namespace collapse {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_density(double f, const NumericOptions& opts, const char* which, double a, double b) {
  if (!(f > opts.density_floor)) {
    std::ostringstream msg;
    msg << "quantile coefficient undefined (null density): " << which << " = " << f << " at (" << a << ", " << b
        << ")";
    throw DomainError(msg.str());
  }
}

template <class F>
double or_nan(F&& f) {
  try {
    return f();
  } catch (const DomainError&) {
    return kNaN;
  }
}

}  // namespace

double quantile_coeff_x(const ContinuousModel& model, double y, double x, std::optional<double> w,
                        const NumericOptions& opts) {
  if (w) {
    const double f = model.pdf_y(y, x, *w);
    require_density(f, opts, "f(y|x,w)", y, x);
    return -cdf_y_dx(model, y, x, *w, opts) / f;
  }
  const double f = marginal_pdf_y(model, y, x, opts);
  require_density(f, opts, "f(y|x)", y, x);
  return -dist_dep(model, y, x, std::nullopt, opts).value / f;
}

double quantile_coeff_w(const ContinuousModel& model, double y, double x, double w, const NumericOptions& opts) {
  const double f = model.pdf_y(y, x, w);
  require_density(f, opts, "f(y|x,w)", y, x);
  return -cdf_y_dw(model, y, x, w, opts) / f;
}

double quantile_coeff_wx(const ContinuousModel& model, double w, double x, const NumericOptions& opts) {
  const double f = model.pdf_w(w, x);
  require_density(f, opts, "f(w|x)", w, x);
  return -cdf_w_dx(model, w, x, opts) / f;
}

double total_effect(const ContinuousModel& model, double y, double x, double w, const NumericOptions& opts) {
  return quantile_coeff_x(model, y, x, w, opts) +
         quantile_coeff_w(model, y, x, w, opts) * quantile_coeff_wx(model, w, x, opts);
}

bool quantile_interior(const ContinuousModel& model, double y, double x, const NumericOptions& opts) {
  const Interval sy = model.support_y_marginal(x);
  const double hy = 2.0 * opts.marginal_diff.step(y);
  if (y - sy.lo < hy || sy.hi - y < hy) return false;
  const Interval sx = smooth_x_piece(model, x);
  const double hx = 2.0 * opts.marginal_diff.step(x);
  if (x - sx.lo < hx || sx.hi - x < hx) return false;
  return true;
}

PosteriorTerms posterior_terms(const ContinuousModel& model, double y, double x, const NumericOptions& opts) {
  if (!quantile_interior(model, y, x, opts)) {
    std::ostringstream msg;
    msg << "(y, x) = (" << y << ", " << x << ") within two differencing steps of a support edge";
    throw DomainError(msg.str());
  }
  const auto bps = w_breakpoints_within(model, y, x);
  // Components: F_x(y|x,w) f(w|x), F_w(y|x,w) F_x(w|x), f(y|x,w) f(w|x).
  auto r = num::integrate_n<3>(
      [&](double w) {
        const double fw = model.pdf_w(w, x);
        return std::array<double, 3>{cdf_y_dx(model, y, x, w, opts) * fw,
                                     cdf_y_dw(model, y, x, w, opts) * cdf_w_dx(model, w, x, opts),
                                     model.pdf_y(y, x, w) * fw};
      },
      model.support_w(x), opts.quadrature, bps);
  PosteriorTerms t;
  t.normalizer = r.value[2];
  require_density(t.normalizer, opts, "f(y|x)", y, x);
  t.criterion = r.value[1];
  t.expected_q_x = -r.value[0] / t.normalizer;
  t.expected_product = r.value[1] / t.normalizer;
  t.q_x_marginal = -dist_dep(model, y, x, std::nullopt, opts).value / t.normalizer;
  return t;
}

double cox_identity_residual(const ContinuousModel& model, double y, double x, const NumericOptions& opts) {
  return posterior_terms(model, y, x, opts).cox_residual();
}

double criterion_integral(const ContinuousModel& model, double y, double x, const NumericOptions& opts) {
  const auto bps = w_breakpoints_within(model, y, x);
  return num::integrate([&](double w) { return cdf_y_dw(model, y, x, w, opts) * cdf_w_dx(model, w, x, opts); },
                        model.support_w(x), opts.quadrature, bps)
      .value;
}

QuantileACollapsibility check_A_collapsibility_quantile(const ContinuousModel& model, const CheckContext& ctx) {
  ctx.grid.validate(model);
  std::vector<std::string> skips;
  auto pts = detail::over_yx<PosteriorTerms>(
      ctx, [&](double y, double x) { return posterior_terms(model, y, x, ctx.numeric); }, skips);
  ViolationTracker t("quantile_A_collapsibility", ctx.tolerance,
                     "q_x(y|x) by finite differences of the quadrature marginal; E_{W|y,x} by shared-node "
                     "quadrature");
  for (const auto& s : skips) t.skip(s);
  QuantileACollapsibility out;
  const std::size_t nx = ctx.grid.xs.size();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (!pts[k]) continue;
    const auto& p = *pts[k];
    const double form_avg = std::abs(p.q_x_marginal - p.expected_q_x);
    const double form_product = std::abs(p.expected_product);
    out.max_product_form = std::max(out.max_product_form, form_product);
    out.max_form_gap = std::max(out.max_form_gap, std::abs(form_avg - form_product));
    t.observe(form_avg, [&] {
      Witness w;
      w.point = {{"y", ctx.grid.ys[k / nx]}, {"x", ctx.grid.xs[k % nx]}};
      w.values = {{"q_x_marginal", p.q_x_marginal},
                  {"expected_q_x_conditional", p.expected_q_x},
                  {"expected_product", p.expected_product}};
      return w;
    });
  }
  out.verdict = t.finish();
  std::ostringstream n;
  n << "product form max |E q_w q_x(w|x)| = " << out.max_product_form << "; max gap between forms = "
    << out.max_form_gap;
  out.verdict.notes.push_back(n.str());
  return out;
}

Verdict check_criterion(const ContinuousModel& model, const CheckContext& ctx) {
  ctx.grid.validate(model);
  std::vector<std::string> skips;
  auto vals = detail::over_yx<double>(
      ctx,
      [&](double y, double x) {
        if (!quantile_interior(model, y, x, ctx.numeric)) throw DomainError("point near a support edge");
        return criterion_integral(model, y, x, ctx.numeric);
      },
      skips);
  ViolationTracker t("criterion_integral", ctx.tolerance, "adaptive quadrature of F_w(y|x,w) F_x(w|x)");
  for (const auto& s : skips) t.skip(s);
  const std::size_t nx = ctx.grid.xs.size();
  for (std::size_t k = 0; k < vals.size(); ++k) {
    if (!vals[k]) continue;
    t.observe(std::abs(*vals[k]), [&] {
      Witness w;
      w.point = {{"y", ctx.grid.ys[k / nx]}, {"x", ctx.grid.xs[k % nx]}};
      w.values = {{"criterion_integral", *vals[k]}};
      return w;
    });
  }
  return t.finish();
}

QuantileProfile quantile_profile(const ContinuousModel& model, const EvalGrid& grid, const NumericOptions& opts,
                                 Execution exec) {
  grid.validate(model);
  QuantileProfile p;
  p.grid = grid;
  const std::size_t ny = grid.ys.size(), nx = grid.xs.size(), nw = grid.ws.size();

  p.q_x_w = evaluate_indexed<double>(
      nx * nw,
      [&](std::size_t k) { return or_nan([&] { return quantile_coeff_wx(model, grid.ws[k % nw], grid.xs[k / nw], opts); }); },
      exec);
  p.q_x_marginal = evaluate_indexed<double>(
      ny * nx,
      [&](std::size_t k) {
        const double y = grid.ys[k / nx], x = grid.xs[k % nx];
        if (!quantile_interior(model, y, x, opts)) return kNaN;
        return or_nan([&] { return quantile_coeff_x(model, y, x, std::nullopt, opts); });
      },
      exec);

  struct Cond {
    double qx, qw;
  };
  auto cond = evaluate_indexed<Cond>(
      ny * nx * nw,
      [&](std::size_t k) {
        const double w = grid.ws[k % nw], x = grid.xs[(k / nw) % nx], y = grid.ys[k / (nw * nx)];
        return Cond{or_nan([&] { return quantile_coeff_x(model, y, x, w, opts); }),
                    or_nan([&] { return quantile_coeff_w(model, y, x, w, opts); })};
      },
      exec);
  p.q_x_cond.resize(cond.size());
  p.q_w_cond.resize(cond.size());
  p.delta.resize(cond.size());
  for (std::size_t k = 0; k < cond.size(); ++k) {
    p.q_x_cond[k] = cond[k].qx;
    p.q_w_cond[k] = cond[k].qw;
    const std::size_t iw = k % nw, ix = (k / nw) % nx;
    p.delta[k] = cond[k].qx + cond[k].qw * p.q_x_w[p.at_xw(ix, iw)];
  }
  return p;
}

std::vector<double> pointwise_product_field(const ContinuousModel& model, const EvalGrid& grid,
                                            const NumericOptions& opts, Execution exec) {
  grid.validate(model);
  const std::size_t nx = grid.xs.size(), nw = grid.ws.size();
  return evaluate_indexed<double>(
      grid.ys.size() * nx * nw,
      [&](std::size_t k) {
        const double w = grid.ws[k % nw], x = grid.xs[(k / nw) % nx], y = grid.ys[k / (nw * nx)];
        return or_nan([&] { return quantile_coeff_w(model, y, x, w, opts) * quantile_coeff_wx(model, w, x, opts); });
      },
      exec);
}

Verdict check_product_vanishes(const ContinuousModel& model, const CheckContext& ctx) {
  const char* property = "product_vanishes_under_completeness";
  if (!model.posterior_complete())
    return not_applicable(property, "family not declared conditionally complete");
  const auto a = check_A_collapsibility_quantile(model, ctx);
  if (!a.verdict.holds) return not_applicable(property, "premise fails: quantile coefficient not A-collapsible");
  const auto field = pointwise_product_field(model, ctx.grid, ctx.numeric, ctx.exec);
  ViolationTracker t(property, ctx.tolerance, "q_w(y|x,w) q_x(w|x) on the grid");
  const auto& g = ctx.grid;
  const std::size_t nx = g.xs.size(), nw = g.ws.size();
  for (std::size_t k = 0; k < field.size(); ++k) {
    if (std::isnan(field[k])) {
      t.skip("coefficient undefined (null density)");
      continue;
    }
    t.observe(std::abs(field[k]), [&] {
      Witness w;
      w.point = {{"y", g.ys[k / (nw * nx)]}, {"x", g.xs[(k / nw) % nx]}, {"w", g.ws[k % nw]}};
      w.values = {{"product", field[k]}};
      return w;
    });
  }
  return t.finish();
}

Verdict check_delta_w_free(const ContinuousModel& model, const CheckContext& ctx) {
  const char* property = "quantile_equals_total_effect";
  const auto p = quantile_profile(model, ctx.grid, ctx.numeric, ctx.exec);
  const auto& g = ctx.grid;
  ViolationTracker t(property, ctx.tolerance, "delta spread over grid w, then |q_x(y|x) - delta|");
  std::size_t premise_fails = 0;
  for (std::size_t iy = 0; iy < g.ys.size(); ++iy)
    for (std::size_t ix = 0; ix < g.xs.size(); ++ix) {
      const double qm = p.q_x_marginal[p.at_yx(iy, ix)];
      if (std::isnan(qm)) {
        t.skip("q_x(y|x) undefined");
        continue;
      }
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t iw = 0; iw < g.ws.size(); ++iw) {
        const double d = p.delta[p.at_yxw(iy, ix, iw)];
        if (std::isnan(d)) continue;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
      if (!(hi >= lo)) {
        t.skip("delta undefined at every grid w");
        continue;
      }
      if (hi - lo > ctx.tolerance) {
        ++premise_fails;
        continue;
      }
      for (std::size_t iw = 0; iw < g.ws.size(); ++iw) {
        const double d = p.delta[p.at_yxw(iy, ix, iw)];
        if (std::isnan(d)) continue;
        t.observe(std::abs(qm - d), [&] {
          Witness w;
          w.point = {{"y", g.ys[iy]}, {"x", g.xs[ix]}, {"w", g.ws[iw]}};
          w.values = {{"q_x_marginal", qm}, {"delta", d}};
          return w;
        });
      }
    }
  if (t.observed() == 0 && premise_fails > 0)
    return not_applicable(property, "premise fails: delta depends on w at every grid (y, x)");
  if (premise_fails) t.note(std::to_string(premise_fails) + " (y, x) point(s) where delta depends on w were not asserted");
  return t.finish();
}

double quantile_function(const ContinuousModel& model, double eta, double x, std::optional<double> w,
                         const NumericOptions& opts) {
  if (w) {
    return num::invert_cdf([&](double y) { return model.cdf_y(y, x, *w); }, eta, model.support_y(x, *w), 1e-13,
                           1e-14);
  }
  return num::invert_cdf([&](double y) { return marginal_cdf_y(model, y, x, opts); }, eta,
                         model.support_y_marginal(x), 1e-12, 1e-13);
}

QuantileSlope quantile_slope(const ContinuousModel& model, double eta, double x, std::optional<double> w,
                             const NumericOptions& opts) {
  QuantileSlope s;
  s.y_eta = quantile_function(model, eta, x, w, opts);
  num::DiffSpec spec = opts.marginal_diff;
  spec.support = smooth_x_piece(model, x);
  s.slope = num::central_diff([&](double t) { return quantile_function(model, eta, t, w, opts); }, x, spec).value;
  s.q_x = quantile_coeff_x(model, s.y_eta, x, w, opts);
  return s;
}

}  // namespace collapse
