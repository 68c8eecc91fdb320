#pragma once

// Shared numerical kernel: central differences, adaptive Gauss-Kronrod
// quadrature with breakpoints, and safeguarded CDF inversion.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <vector>

#include "collapse/error.hpp"

namespace collapse::num {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double t) const { return t >= lo && t <= hi; }
  bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
  Interval shrunk(double margin) const { return {lo + margin, hi - margin}; }
};

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;
  // Applied to infinite endpoints; an infinite interval without it is an error.
  std::optional<Interval> truncation;
};

enum class DiffScheme { central2, central4 };

struct DiffSpec {
  DiffScheme scheme = DiffScheme::central4;
  double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
  // Stencil points stay inside; one-sided second-order differences are used
  // when a central stencil would leave it.
  std::optional<Interval> support;

  double step(double x) const { return h0 * std::max(1.0, std::abs(x)); }
};

enum class DiffKind { central, forward, backward };

struct Derivative {
  double value = 0.0;
  double error_proxy = 0.0;  // |2pt - 4pt| for central schemes
  DiffKind kind = DiffKind::central;
};

struct Integral {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

template <std::size_t N>
struct IntegralN {
  std::array<double, N> value{};
  double error = 0.0;
  int subdivisions = 0;
};

// Tolerances used by everything that differentiates or integrates a model.
struct NumericOptions {
  QuadratureSpec quadrature{1e-13, 1e-12, 4000, std::nullopt};
  DiffSpec conditional_diff{};
  // d/dx of quadrature-defined marginals: the function carries ~1e-13 noise,
  // so a wider 4-point stencil keeps both truncation and noise below 1e-9.
  DiffSpec marginal_diff{DiffScheme::central4, 1e-3, std::nullopt};
  double density_floor = 1e-12;
};

Derivative central_diff(const std::function<double(double)>& f, double x, const DiffSpec& spec);

Integral integrate(const std::function<double(double)>& f, Interval interval,
                   const QuadratureSpec& spec, std::span<const double> breakpoints = {});

// Solves F(y) = eta for nondecreasing F on a bracket with F(lo) <= eta <= F(hi).
double invert_cdf(const std::function<double(double)>& cdf, double eta, Interval bracket,
                  double f_tol = 1e-10, double x_tol = 1e-12);

double normal_pdf(double z);
double normal_cdf(double z);

namespace detail {

// Gauss-Kronrod 7/15 nodes on [-1, 1] (non-negative half).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t N>
struct Panel {
  double a = 0.0;
  double b = 0.0;
  std::array<double, N> value{};
  std::array<double, N> error{};
  double max_error = 0.0;
  bool operator<(const Panel& other) const { return max_error < other.max_error; }
};

template <std::size_t N, class F>
Panel<N> gauss_kronrod(F& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<double, 15> nodes_t{};
  std::array<std::array<double, N>, 15> fv{};
  for (int k = 0; k < 7; ++k) {
    nodes_t[2 * k] = center - half * kKronrodNodes[k];
    nodes_t[2 * k + 1] = center + half * kKronrodNodes[k];
  }
  nodes_t[14] = center;
  for (int k = 0; k < 15; ++k) {
    fv[k] = f(nodes_t[k]);
    for (std::size_t c = 0; c < N; ++c) {
      if (!std::isfinite(fv[k][c])) {
        std::ostringstream msg;
        msg << "integrand is not finite at t=" << nodes_t[k];
        throw NumericalError(msg.str());
      }
    }
  }

  Panel<N> panel;
  panel.a = a;
  panel.b = b;
  for (std::size_t c = 0; c < N; ++c) {
    double kronrod = kKronrodWeights[7] * fv[14][c];
    double gauss = kGaussWeights[3] * fv[14][c];
    double abs_sum = std::abs(kronrod);
    for (int k = 0; k < 7; ++k) {
      const double pair = fv[2 * k][c] + fv[2 * k + 1][c];
      kronrod += kKronrodWeights[k] * pair;
      abs_sum += kKronrodWeights[k] * (std::abs(fv[2 * k][c]) + std::abs(fv[2 * k + 1][c]));
      if (k % 2 == 1) gauss += kGaussWeights[k / 2] * pair;
    }
    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[7] * std::abs(fv[14][c] - mean);
    for (int k = 0; k < 7; ++k)
      asc += kKronrodWeights[k] * (std::abs(fv[2 * k][c] - mean) + std::abs(fv[2 * k + 1][c] - mean));

    const double result = kronrod * half;
    const double resabs = abs_sum * std::abs(half);
    const double resasc = asc * std::abs(half);
    double err = std::abs((kronrod - gauss) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    panel.value[c] = result;
    panel.error[c] = err;
    panel.max_error = std::max(panel.max_error, err);
  }
  return panel;
}

}  // namespace detail

// Vector-valued adaptive quadrature sharing nodes across components. The
// integrand returns std::array<double, N>.
template <std::size_t N, class F>
IntegralN<N> integrate_n(F&& f, Interval interval, const QuadratureSpec& spec,
                         std::span<const double> breakpoints = {}) {
  if (spec.abs_tol <= 0.0 || spec.rel_tol <= 0.0 || spec.max_subdivisions < 1)
    throw InputError("quadrature tolerances must be positive and max_subdivisions >= 1");
  if (std::isinf(interval.lo) || std::isinf(interval.hi)) {
    if (!spec.truncation) throw InputError("unbounded integration interval without truncation");
    interval.lo = std::max(interval.lo, spec.truncation->lo);
    interval.hi = std::min(interval.hi, spec.truncation->hi);
  }
  if (!interval.finite() || std::isnan(interval.lo) || std::isnan(interval.hi))
    throw InputError("integration interval is not finite");

  IntegralN<N> out;
  if (interval.hi <= interval.lo) return out;

  std::vector<double> cuts{interval.lo};
  {
    std::vector<double> inner;
    for (double p : breakpoints)
      if (p > interval.lo && p < interval.hi) inner.push_back(p);
    std::sort(inner.begin(), inner.end());
    for (double p : inner)
      if (p - cuts.back() > 1e-14 * std::max(1.0, std::abs(p))) cuts.push_back(p);
    if (interval.hi - cuts.back() <= 1e-14 * std::max(1.0, std::abs(interval.hi))) cuts.pop_back();
    cuts.push_back(interval.hi);
  }

  std::priority_queue<detail::Panel<N>> panels;
  std::array<double, N> total{};
  std::array<double, N> total_err{};
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    auto p = detail::gauss_kronrod<N>(f, cuts[k], cuts[k + 1]);
    for (std::size_t c = 0; c < N; ++c) {
      total[c] += p.value[c];
      total_err[c] += p.error[c];
    }
    panels.push(p);
  }

  auto converged = [&] {
    for (std::size_t c = 0; c < N; ++c)
      if (total_err[c] > std::max(spec.abs_tol, spec.rel_tol * std::abs(total[c]))) return false;
    return true;
  };

  int subdivisions = static_cast<int>(panels.size());
  while (!converged()) {
    if (subdivisions >= spec.max_subdivisions) {
      double worst = 0.0;
      for (double e : total_err) worst = std::max(worst, e);
      std::ostringstream msg;
      msg << "quadrature did not converge on [" << interval.lo << ", " << interval.hi << "] after "
          << subdivisions << " subdivisions (estimate " << total[0] << ", error bound " << worst << ")";
      throw NumericalError(msg.str(), total[0], worst);
    }
    detail::Panel<N> worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Panel at floating point resolution; accept what we have.
      panels.push(worst);
      break;
    }
    auto left = detail::gauss_kronrod<N>(f, worst.a, mid);
    auto right = detail::gauss_kronrod<N>(f, mid, worst.b);
    for (std::size_t c = 0; c < N; ++c) {
      total[c] += left.value[c] + right.value[c] - worst.value[c];
      total_err[c] += left.error[c] + right.error[c] - worst.error[c];
    }
    panels.push(left);
    panels.push(right);
    ++subdivisions;
  }

  // Re-sum to avoid drift from the incremental updates.
  out.value = {};
  double err = 0.0;
  std::array<double, N> errs{};
  while (!panels.empty()) {
    const auto& p = panels.top();
    for (std::size_t c = 0; c < N; ++c) {
      out.value[c] += p.value[c];
      errs[c] += p.error[c];
    }
    panels.pop();
  }
  for (double e : errs) err = std::max(err, e);
  out.error = err;
  out.subdivisions = subdivisions;
  return out;
}

}  // namespace collapse::num
