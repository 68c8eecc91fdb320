#include "collapse/numerics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace collapse::num {

namespace {

double checked(const std::function<double(double)>& f, double t) {
  const double v = f(t);
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "function value is not finite at stencil point " << t;
    throw NumericalError(msg.str());
  }
  return v;
}

}  // namespace

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

Derivative central_diff(const std::function<double(double)>& f, double x, const DiffSpec& spec) {
  if (!(spec.h0 > 0.0)) throw InputError("difference step h0 must be positive");
  const double h = spec.step(x);
  const int reach = spec.scheme == DiffScheme::central4 ? 2 : 1;

  Derivative d;
  const bool fits_left = !spec.support || x - reach * h >= spec.support->lo;
  const bool fits_right = !spec.support || x + reach * h <= spec.support->hi;
  if (fits_left && fits_right) {
    const double fp = checked(f, x + h);
    const double fm = checked(f, x - h);
    const double d2 = (fp - fm) / (2.0 * h);
    if (spec.scheme == DiffScheme::central2) {
      d.value = d2;
      // A 4-point estimate is only used for the error proxy when it fits.
      if (!spec.support || (x - 2 * h >= spec.support->lo && x + 2 * h <= spec.support->hi)) {
        const double d4 = (-checked(f, x + 2 * h) + 8.0 * fp - 8.0 * fm + checked(f, x - 2 * h)) / (12.0 * h);
        d.error_proxy = std::abs(d2 - d4);
      }
    } else {
      const double d4 = (-checked(f, x + 2 * h) + 8.0 * fp - 8.0 * fm + checked(f, x - 2 * h)) / (12.0 * h);
      d.value = d4;
      d.error_proxy = std::abs(d2 - d4);
    }
    return d;
  }

  // One-sided second-order differences at support boundaries.
  const double f0 = checked(f, x);
  if (!fits_left) {
    if (spec.support && x + 2 * h > spec.support->hi) {
      std::ostringstream msg;
      msg << "support too narrow to difference at x=" << x;
      throw NumericalError(msg.str());
    }
    const double f1 = checked(f, x + h);
    const double f2 = checked(f, x + 2 * h);
    d.value = (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
    d.error_proxy = std::abs(d.value - (f1 - f0) / h);
    d.kind = DiffKind::forward;
  } else {
    const double f1 = checked(f, x - h);
    const double f2 = checked(f, x - 2 * h);
    d.value = (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * h);
    d.error_proxy = std::abs(d.value - (f0 - f1) / h);
    d.kind = DiffKind::backward;
  }
  return d;
}

Integral integrate(const std::function<double(double)>& f, Interval interval, const QuadratureSpec& spec,
                   std::span<const double> breakpoints) {
  auto wrapped = [&f](double t) { return std::array<double, 1>{f(t)}; };
  auto r = integrate_n<1>(wrapped, interval, spec, breakpoints);
  return {r.value[0], r.error, r.subdivisions};
}

double invert_cdf(const std::function<double(double)>& cdf, double eta, Interval bracket, double f_tol,
                  double x_tol) {
  if (!(eta > 0.0 && eta < 1.0)) throw InputError("quantile level must satisfy 0 < eta < 1");
  if (!(bracket.lo < bracket.hi) || !bracket.finite()) throw InputError("invalid inversion bracket");

  double lo = bracket.lo;
  double hi = bracket.hi;
  double f_lo = cdf(lo);
  double f_hi = cdf(hi);
  if (!(f_lo <= eta && eta <= f_hi)) {
    std::ostringstream msg;
    msg << "bracket [" << lo << ", " << hi << "] does not contain level " << eta << " (F = " << f_lo << ", "
        << f_hi << ")";
    throw DomainError(msg.str());
  }
  if (f_lo == eta) return lo;
  if (f_hi == eta) return hi;

  // Illinois-style regula falsi on (lo, hi), falling back to bisection when
  // the bracket does not halve. g_* are the secant ordinates, f_* the true
  // CDF values used for the monotonicity check.
  double g_lo = f_lo;
  double g_hi = f_hi;
  int stale_side = 0;
  double last_width = hi - lo;
  for (int iter = 0; iter < 400; ++iter) {
    double t = g_hi > g_lo ? lo + (eta - g_lo) * (hi - lo) / (g_hi - g_lo) : 0.5 * (lo + hi);
    if (iter % 3 == 2) {
      if (hi - lo > 0.5 * last_width) t = 0.5 * (lo + hi);
      last_width = hi - lo;
    }
    if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);

    const double ft = cdf(t);
    // Slack absorbs quadrature noise in marginal CDFs.
    if (!std::isfinite(ft) || ft < f_lo - 1e-11 || ft > f_hi + 1e-11) throw DomainError("not a CDF: non-monotone values");
    if (std::abs(ft - eta) <= f_tol) return t;
    if (ft < eta) {
      lo = t;
      f_lo = g_lo = ft;
      if (stale_side == -1) g_hi = eta + 0.5 * (g_hi - eta);
      stale_side = -1;
    } else {
      hi = t;
      f_hi = g_hi = ft;
      if (stale_side == 1) g_lo = eta - 0.5 * (eta - g_lo);
      stale_side = 1;
    }
    if (hi - lo <= x_tol) return 0.5 * (lo + hi);
  }
  throw NumericalError("CDF inversion did not converge", 0.5 * (lo + hi), hi - lo);
}

}  // namespace collapse::num
