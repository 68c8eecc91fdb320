#include "collapse/families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "collapse/error.hpp"

namespace collapse {

using num::normal_cdf;
using num::normal_pdf;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string("parameter ") + name + " must be positive");
}

void require_truncation(double t) {
  if (!(t >= 4.0) || !std::isfinite(t)) throw InputError("truncation_sd must be finite and >= 4");
}

}  // namespace

// ---------------------------------------------------------------------------
// uniform-quadratic

UniformQuadratic::UniformQuadratic(double w_sd, double truncation_sd) : w_sd_(w_sd), truncation_sd_(truncation_sd) {
  require_positive(w_sd, "w_sd");
  require_truncation(truncation_sd);
}

std::vector<std::pair<std::string, double>> UniformQuadratic::parameters() const {
  return {{"w_sd", w_sd_}, {"truncation_sd", truncation_sd_}};
}

double UniformQuadratic::cdf_y(double y, double x, double w) const {
  if (y <= 0.0) return 0.0;
  return std::min(1.0, y * scale(x, w));
}

double UniformQuadratic::pdf_y(double y, double x, double w) const { return inside(y, x, w) ? scale(x, w) : 0.0; }

double UniformQuadratic::pdf_w(double w, double x) const { return normal_pdf((w - x) / w_sd_) / w_sd_; }

double UniformQuadratic::cdf_w(double w, double x) const { return normal_cdf((w - x) / w_sd_); }

Interval UniformQuadratic::support_x() const { return {std::numeric_limits<double>::min(), kInf}; }

Interval UniformQuadratic::support_y(double x, double w) const { return {0.0, 1.0 / scale(x, w)}; }

Interval UniformQuadratic::support_w(double x) const {
  return {x - truncation_sd_ * w_sd_, x + truncation_sd_ * w_sd_};
}

Interval UniformQuadratic::support_y_marginal(double x) const { return {0.0, 1.0 / (x * x)}; }

std::vector<double> UniformQuadratic::w_breakpoints(double y, double x) const {
  if (y <= 0.0) return {};
  const double t2 = 1.0 / y - x * x;
  if (t2 <= 0.0) return {x};
  const double t = std::sqrt(t2);
  return {x - t, x + t};
}

std::optional<double> UniformQuadratic::cdf_y_dx(double y, double x, double w) const {
  return inside(y, x, w) ? y * (2.0 * x + 2.0 * (x - w)) : 0.0;
}

std::optional<double> UniformQuadratic::cdf_y_dw(double y, double x, double w) const {
  return inside(y, x, w) ? 2.0 * y * (w - x) : 0.0;
}

std::optional<double> UniformQuadratic::pdf_y_dx(double y, double x, double w) const {
  return inside(y, x, w) ? 2.0 * x + 2.0 * (x - w) : 0.0;
}

std::optional<double> UniformQuadratic::pdf_w_dx(double w, double x) const {
  const double z = (w - x) / w_sd_;
  return z * normal_pdf(z) / (w_sd_ * w_sd_);
}

std::optional<double> UniformQuadratic::cdf_w_dx(double w, double x) const {
  return -normal_pdf((w - x) / w_sd_) / w_sd_;
}

// ---------------------------------------------------------------------------
// uniform-shift

UniformShift::UniformShift(double w_shift, double truncation_sd) : w_shift_(w_shift), truncation_sd_(truncation_sd) {
  if (!std::isfinite(w_shift)) throw InputError("parameter w_shift must be finite");
  require_truncation(truncation_sd);
}

std::vector<std::pair<std::string, double>> UniformShift::parameters() const {
  return {{"w_shift", w_shift_}, {"truncation_sd", truncation_sd_}};
}

double UniformShift::cdf_y(double y, double x, double w) const {
  return std::clamp((y + x - w) / (2.0 * x), 0.0, 1.0);
}

double UniformShift::pdf_y(double y, double x, double w) const { return inside(y, x, w) ? 0.5 / x : 0.0; }

double UniformShift::pdf_w(double w, double x) const { return normal_pdf((w - w_shift_) / x) / x; }

double UniformShift::cdf_w(double w, double x) const { return normal_cdf((w - w_shift_) / x); }

Interval UniformShift::support_x() const { return {std::numeric_limits<double>::min(), kInf}; }

Interval UniformShift::support_y(double x, double w) const { return {w - x, w + x}; }

Interval UniformShift::support_w(double x) const {
  return {w_shift_ - truncation_sd_ * x, w_shift_ + truncation_sd_ * x};
}

Interval UniformShift::support_y_marginal(double x) const {
  const Interval sw = support_w(x);
  return {sw.lo - x, sw.hi + x};
}

std::vector<double> UniformShift::w_breakpoints(double y, double x) const { return {y - x, y + x}; }

std::optional<double> UniformShift::cdf_y_dx(double y, double x, double w) const {
  return inside(y, x, w) ? (w - y) / (2.0 * x * x) : 0.0;
}

std::optional<double> UniformShift::cdf_y_dw(double y, double x, double w) const {
  return inside(y, x, w) ? -0.5 / x : 0.0;
}

std::optional<double> UniformShift::pdf_y_dx(double y, double x, double w) const {
  return inside(y, x, w) ? -0.5 / (x * x) : 0.0;
}

std::optional<double> UniformShift::pdf_w_dx(double w, double x) const {
  const double z = (w - w_shift_) / x;
  return normal_pdf(z) * (z * z - 1.0) / (x * x);
}

std::optional<double> UniformShift::cdf_w_dx(double w, double x) const {
  const double z = (w - w_shift_) / x;
  return -z * normal_pdf(z) / x;
}

// ---------------------------------------------------------------------------
// Gaussian linear families

GaussianLinear::GaussianLinear(std::string tag, const GaussianLinearParams& p) : tag_(std::move(tag)), p_(p) {
  require_positive(p.sigma, "sigma");
  require_positive(p.w_sd, "w_sd");
  require_truncation(p.truncation_sd);
  for (double v : {p.alpha1, p.alpha2, p.alpha3, p.w_mean, p.w_slope})
    if (!std::isfinite(v)) throw InputError("parameters must be finite");
}

std::vector<std::pair<std::string, double>> GaussianLinear::parameters() const {
  if (tag_ == "ci-yw") {
    return {{"beta", p_.alpha1},     {"sigma", p_.sigma}, {"w_mean", p_.w_mean}, {"w_slope", p_.w_slope},
            {"w_sd", p_.w_sd},       {"truncation_sd", p_.truncation_sd}};
  }
  if (tag_ == "indep-xw") {
    return {{"alpha1", p_.alpha1}, {"alpha2", p_.alpha2}, {"alpha3", p_.alpha3},
            {"sigma", p_.sigma},   {"w_mean", p_.w_mean}, {"w_sd", p_.w_sd},
            {"truncation_sd", p_.truncation_sd}};
  }
  return {{"alpha1", p_.alpha1}, {"alpha2", p_.alpha2},   {"alpha3", p_.alpha3}, {"sigma", p_.sigma},
          {"w_mean", p_.w_mean}, {"w_slope", p_.w_slope}, {"w_sd", p_.w_sd},     {"truncation_sd", p_.truncation_sd}};
}

double GaussianLinear::cdf_y(double y, double x, double w) const { return normal_cdf((y - mean_y(x, w)) / p_.sigma); }

double GaussianLinear::pdf_y(double y, double x, double w) const {
  return normal_pdf((y - mean_y(x, w)) / p_.sigma) / p_.sigma;
}

double GaussianLinear::pdf_w(double w, double x) const { return normal_pdf((w - mean_w(x)) / p_.w_sd) / p_.w_sd; }

double GaussianLinear::cdf_w(double w, double x) const { return normal_cdf((w - mean_w(x)) / p_.w_sd); }

Interval GaussianLinear::support_x() const { return {-kInf, kInf}; }

Interval GaussianLinear::support_y(double x, double w) const {
  const double m = mean_y(x, w);
  return {m - p_.truncation_sd * p_.sigma, m + p_.truncation_sd * p_.sigma};
}

Interval GaussianLinear::support_w(double x) const {
  const double m = mean_w(x);
  return {m - p_.truncation_sd * p_.w_sd, m + p_.truncation_sd * p_.w_sd};
}

Interval GaussianLinear::support_y_marginal(double x) const {
  const Interval sw = support_w(x);
  const double a = mean_y(x, sw.lo);
  const double b = mean_y(x, sw.hi);
  const double reach = p_.truncation_sd * p_.sigma;
  return {std::min(a, b) - reach, std::max(a, b) + reach};
}

std::optional<double> GaussianLinear::cdf_y_dx(double y, double x, double w) const {
  const double z = (y - mean_y(x, w)) / p_.sigma;
  return -(p_.alpha1 + p_.alpha3 * w) / p_.sigma * normal_pdf(z);
}

std::optional<double> GaussianLinear::cdf_y_dw(double y, double x, double w) const {
  const double z = (y - mean_y(x, w)) / p_.sigma;
  return -(p_.alpha2 + p_.alpha3 * x) / p_.sigma * normal_pdf(z);
}

std::optional<double> GaussianLinear::pdf_y_dx(double y, double x, double w) const {
  const double z = (y - mean_y(x, w)) / p_.sigma;
  return z * normal_pdf(z) * (p_.alpha1 + p_.alpha3 * w) / (p_.sigma * p_.sigma);
}

std::optional<double> GaussianLinear::pdf_w_dx(double w, double x) const {
  const double u = (w - mean_w(x)) / p_.w_sd;
  return u * normal_pdf(u) * p_.w_slope / (p_.w_sd * p_.w_sd);
}

std::optional<double> GaussianLinear::cdf_w_dx(double w, double x) const {
  const double u = (w - mean_w(x)) / p_.w_sd;
  return -normal_pdf(u) * p_.w_slope / p_.w_sd;
}

// ---------------------------------------------------------------------------

std::vector<std::string> builtin_families() {
  return {"uniform-quadratic", "uniform-shift", "linear-interaction", "ci-yw", "indep-xw", "grid"};
}

namespace {

double take(const ParamMap& params, std::set<std::string>& used, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  used.insert(key);
  return it->second;
}

void reject_unknown(const ParamMap& params, const std::set<std::string>& used, const std::string& family) {
  for (const auto& [k, v] : params)
    if (!used.count(k)) throw InputError("unknown parameter '" + k + "' for family " + family);
}

}  // namespace

ModelPtr make_model(const std::string& family, const ParamMap& params) {
  std::set<std::string> used;
  ModelPtr model;
  if (family == "uniform-quadratic") {
    const double w_sd = take(params, used, "w_sd", 1.0);
    const double trunc = take(params, used, "truncation_sd", 8.0);
    reject_unknown(params, used, family);
    model = std::make_shared<UniformQuadratic>(w_sd, trunc);
  } else if (family == "uniform-shift") {
    const double shift = take(params, used, "w_shift", 0.0);
    const double trunc = take(params, used, "truncation_sd", 8.0);
    reject_unknown(params, used, family);
    model = std::make_shared<UniformShift>(shift, trunc);
  } else if (family == "linear-interaction" || family == "ci-yw" || family == "indep-xw") {
    GaussianLinearParams p;
    if (family == "ci-yw") {
      p.alpha1 = take(params, used, "beta", 1.0);
      p.alpha2 = 0.0;
      p.alpha3 = 0.0;
    } else {
      p.alpha1 = take(params, used, "alpha1", p.alpha1);
      p.alpha2 = take(params, used, "alpha2", p.alpha2);
      p.alpha3 = take(params, used, "alpha3", p.alpha3);
    }
    p.sigma = take(params, used, "sigma", p.sigma);
    p.w_mean = take(params, used, "w_mean", p.w_mean);
    p.w_slope = family == "indep-xw" ? 0.0 : take(params, used, "w_slope", p.w_slope);
    p.w_sd = take(params, used, "w_sd", p.w_sd);
    p.truncation_sd = take(params, used, "truncation_sd", p.truncation_sd);
    reject_unknown(params, used, family);
    model = std::make_shared<GaussianLinear>(family, p);
  } else if (family == "grid") {
    throw InputError("family 'grid' needs tabulated arrays; construct GridModel directly");
  } else {
    throw InputError("unknown model family '" + family + "'");
  }
  return model;
}

}  // namespace collapse
