#include "collapse/dependence.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "collapse/error.hpp"

namespace collapse {

const char* to_string(DepKind k) { return k == DepKind::distribution ? "distribution" : "density"; }

const char* to_string(DepScope s) { return s == DepScope::conditional ? "conditional" : "marginal"; }

const char* to_string(DepMethod m) {
  switch (m) {
    case DepMethod::analytic:
      return "analytic";
    case DepMethod::finite_difference:
      return "finite-difference";
    case DepMethod::one_sided:
      return "one-sided";
    case DepMethod::adjacent_difference:
      return "adjacent-difference";
    case DepMethod::undefined:
      return "undefined";
  }
  return "?";
}

Rational dist_dep_discrete(const DiscreteJoint& joint, std::size_t y, std::size_t i, const WCondition& cond) {
  if (i + 1 >= joint.nx()) throw InputError("X index out of range for adjacent differencing");
  if (y >= joint.ny()) throw InputError("Y level out of range");
  return joint.cdf(y, i + 1, cond) - joint.cdf(y, i, cond);
}

namespace {

DepValue from_fd(const num::Derivative& d) {
  return {d.value, d.kind == num::DiffKind::central ? DepMethod::finite_difference : DepMethod::one_sided,
          d.error_proxy};
}

num::DiffSpec x_spec(const ContinuousModel& model, double x, num::DiffSpec spec) {
  spec.support = smooth_x_piece(model, x);
  return spec;
}

DepValue analytic(const ContinuousModel& model, double x, double v) {
  return {v, model.one_sided_x(x) ? DepMethod::one_sided : DepMethod::analytic, 0.0};
}

void require_smooth(const std::function<double(double)>& f, double x, double h, const Interval& piece,
                    double floor) {
  const double f0 = f(x);
  const double scale = std::max(std::abs(f0), floor);
  for (double t : {x - h, x + h}) {
    if (!piece.contains(t)) continue;
    if (std::abs(f(t) - f0) > 0.1 * scale) {
      std::ostringstream msg;
      msg << "non-differentiable point: density jumps by more than 10% between x=" << x << " and x=" << t;
      throw DomainError(msg.str());
    }
  }
}

}  // namespace

double cdf_y_dx(const ContinuousModel& model, double y, double x, double w, const NumericOptions& opts) {
  if (auto a = model.cdf_y_dx(y, x, w)) return *a;
  return num::central_diff([&](double t) { return model.cdf_y(y, t, w); }, x,
                           x_spec(model, x, opts.conditional_diff))
      .value;
}

double cdf_y_dw(const ContinuousModel& model, double y, double x, double w, const NumericOptions& opts) {
  if (auto a = model.cdf_y_dw(y, x, w)) return *a;
  return num::central_diff([&](double t) { return model.cdf_y(y, x, t); }, w, opts.conditional_diff).value;
}

double pdf_y_dx(const ContinuousModel& model, double y, double x, double w, const NumericOptions& opts) {
  if (auto a = model.pdf_y_dx(y, x, w)) return *a;
  return num::central_diff([&](double t) { return model.pdf_y(y, t, w); }, x,
                           x_spec(model, x, opts.conditional_diff))
      .value;
}

double pdf_w_dx(const ContinuousModel& model, double w, double x, const NumericOptions& opts) {
  if (auto a = model.pdf_w_dx(w, x)) return *a;
  return num::central_diff([&](double t) { return model.pdf_w(w, t); }, x, x_spec(model, x, opts.conditional_diff))
      .value;
}

double cdf_w_dx(const ContinuousModel& model, double w, double x, const NumericOptions& opts) {
  if (auto a = model.cdf_w_dx(w, x)) return *a;
  return num::central_diff([&](double t) { return model.cdf_w(w, t); }, x, x_spec(model, x, opts.conditional_diff))
      .value;
}

DepValue dist_dep(const ContinuousModel& model, double y, double x, std::optional<double> w,
                  const NumericOptions& opts) {
  if (w) {
    if (auto a = model.cdf_y_dx(y, x, *w)) return analytic(model, x, *a);
    return from_fd(num::central_diff([&](double t) { return model.cdf_y(y, t, *w); }, x,
                                     x_spec(model, x, opts.conditional_diff)));
  }
  return from_fd(num::central_diff([&](double t) { return marginal_cdf_y(model, y, t, opts); }, x,
                                   x_spec(model, x, opts.marginal_diff)));
}

DepValue density_dep(const ContinuousModel& model, double y, double x, std::optional<double> w,
                     const NumericOptions& opts) {
  const Interval piece = smooth_x_piece(model, x);
  if (w) {
    auto f = [&](double t) { return model.pdf_y(y, t, *w); };
    require_smooth(f, x, opts.conditional_diff.step(x), piece, opts.density_floor);
    if (auto a = model.pdf_y_dx(y, x, *w)) return analytic(model, x, *a);
    return from_fd(num::central_diff(f, x, x_spec(model, x, opts.conditional_diff)));
  }
  auto f = [&](double t) { return marginal_pdf_y(model, y, t, opts); };
  require_smooth(f, x, opts.marginal_diff.step(x), piece, opts.density_floor);
  return from_fd(num::central_diff(f, x, x_spec(model, x, opts.marginal_diff)));
}

Decomposition decomposition_terms(const ContinuousModel& model, double y, double x, const NumericOptions& opts) {
  const auto bps = w_breakpoints_within(model, y, x);
  auto r = num::integrate_n<2>(
      [&](double w) {
        const double fw = model.pdf_w(w, x);
        return std::array<double, 2>{cdf_y_dx(model, y, x, w, opts) * fw,
                                     model.cdf_y(y, x, w) * pdf_w_dx(model, w, x, opts)};
      },
      model.support_w(x), opts.quadrature, bps);
  return {r.value[0], r.value[1], r.error};
}

std::size_t DependenceField::undefined_count() const {
  std::size_t n = 0;
  for (auto m : methods) n += m == DepMethod::undefined;
  return n;
}

DependenceField dependence_field(const ContinuousModel& model, const EvalGrid& grid, DepKind kind, DepScope scope,
                                 const NumericOptions& opts, Execution exec) {
  grid.validate(model);
  DependenceField field;
  field.kind = kind;
  field.scope = scope;
  field.grid = grid;
  const std::size_t nw = scope == DepScope::conditional ? grid.ws.size() : 1;
  const std::size_t n = grid.ys.size() * grid.xs.size() * nw;

  struct Point {
    DepValue v;
    std::string note;
  };
  auto points = evaluate_indexed<Point>(
      n,
      [&](std::size_t k) {
        const std::size_t iw = k % nw;
        const std::size_t ix = (k / nw) % grid.xs.size();
        const std::size_t iy = k / (nw * grid.xs.size());
        const double y = grid.ys[iy], x = grid.xs[ix];
        std::optional<double> w;
        if (scope == DepScope::conditional) w = grid.ws[iw];
        Point p;
        try {
          p.v = kind == DepKind::distribution ? dist_dep(model, y, x, w, opts) : density_dep(model, y, x, w, opts);
        } catch (const DomainError& e) {
          p.v = {std::numeric_limits<double>::quiet_NaN(), DepMethod::undefined, 0.0};
          p.note = e.what();
        }
        return p;
      },
      exec);

  field.values.reserve(n);
  field.methods.reserve(n);
  std::size_t skipped = 0;
  for (auto& p : points) {
    field.values.push_back(p.v.value);
    field.methods.push_back(p.v.method);
    if (!p.note.empty() && skipped++ == 0) field.notes.push_back("first undefined point: " + p.note);
  }
  if (skipped) field.notes.push_back(std::to_string(skipped) + " grid point(s) undefined and skipped");
  return field;
}

DiscreteDependence discrete_dependence(const DiscreteJoint& joint) {
  DiscreteDependence d;
  d.ny = joint.ny() - 1;
  d.ni = joint.nx() - 1;
  d.nw = joint.nw();
  d.conditional.resize(d.ny * d.ni * d.nw);
  d.marginal.resize(d.ny * d.ni);
  for (std::size_t y = 0; y < d.ny; ++y) {
    for (std::size_t i = 0; i < d.ni; ++i) {
      for (std::size_t w = 0; w < d.nw; ++w) {
        try {
          d.conditional[(y * d.ni + i) * d.nw + w] = dist_dep_discrete(joint, y, i, WCondition::level(w));
        } catch (const DomainError& e) {
          if (y == 0) d.notes.push_back(e.what());
        }
      }
      try {
        d.marginal[y * d.ni + i] = dist_dep_discrete(joint, y, i, WCondition::marginal());
      } catch (const DomainError& e) {
        if (y == 0) d.notes.push_back(e.what());
      }
    }
  }
  return d;
}

}  // namespace collapse
