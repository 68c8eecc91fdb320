#include "collapse/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "collapse/error.hpp"

namespace collapse {

namespace {

std::optional<double> numeric_label(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::vector<std::string> order_levels(std::vector<std::string> seen, LevelOrder order,
                                      const std::vector<std::string>& explicit_order, const char* axis) {
  if (!explicit_order.empty()) {
    for (const auto& s : seen) {
      if (std::find(explicit_order.begin(), explicit_order.end(), s) == explicit_order.end())
        throw InputError(std::string("level '") + s + "' of " + axis + " missing from explicit ordering");
    }
    std::vector<std::string> out;
    for (const auto& s : explicit_order)
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    return out;
  }
  if (order == LevelOrder::numeric_lexicographic) {
    std::stable_sort(seen.begin(), seen.end(), [](const std::string& a, const std::string& b) {
      auto na = numeric_label(a);
      auto nb = numeric_label(b);
      if (na && nb) return *na < *nb;
      if (na.has_value() != nb.has_value()) return na.has_value();
      return a < b;
    });
  }
  return seen;
}

}  // namespace

WCondition WCondition::set(std::vector<std::size_t> levels) {
  if (levels.empty()) throw InputError("empty W conditioning set");
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return WCondition(std::move(levels));
}

bool WCondition::contains(std::size_t w) const {
  if (!levels_) return true;
  return std::binary_search(levels_->begin(), levels_->end(), w);
}

DiscreteJoint DiscreteJoint::build(std::span<const TableRow> rows, const LevelOrdering& ordering) {
  std::vector<std::string> ys, xs, ws;
  auto note = [](std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  };
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].count < 0) {
      std::ostringstream msg;
      msg << "negative count in row " << r + 1 << " (y=" << rows[r].y << ", x=" << rows[r].x << ", w=" << rows[r].w
          << ", count=" << rows[r].count.get_str() << ")";
      throw InputError(msg.str());
    }
    note(ys, rows[r].y);
    note(xs, rows[r].x);
    note(ws, rows[r].w);
  }
  ys = order_levels(std::move(ys), ordering.order, ordering.y, "Y");
  xs = order_levels(std::move(xs), ordering.order, ordering.x, "X");
  ws = order_levels(std::move(ws), ordering.order, ordering.w, "W");

  auto index_of = [](const std::vector<std::string>& v, const std::string& s) {
    return static_cast<std::size_t>(std::find(v.begin(), v.end(), s) - v.begin());
  };
  std::vector<Rational> counts(ys.size() * xs.size() * ws.size());
  for (const auto& row : rows) {
    const std::size_t k = (index_of(ys, row.y) * xs.size() + index_of(xs, row.x)) * ws.size() + index_of(ws, row.w);
    counts[k] += row.count;
  }
  return from_counts(std::move(ys), std::move(xs), std::move(ws), std::move(counts));
}

DiscreteJoint DiscreteJoint::from_counts(std::vector<std::string> levels_y, std::vector<std::string> levels_x,
                                         std::vector<std::string> levels_w, std::vector<Rational> counts) {
  if (levels_x.size() < 2) throw InputError("X needs at least 2 levels for adjacent differencing");
  if (levels_y.empty() || levels_w.empty()) throw InputError("Y and W need at least one level");
  if (counts.size() != levels_y.size() * levels_x.size() * levels_w.size())
    throw InputError("count array does not match level dimensions");

  DiscreteJoint j;
  j.levels_y_ = std::move(levels_y);
  j.levels_x_ = std::move(levels_x);
  j.levels_w_ = std::move(levels_w);
  j.counts_ = std::move(counts);
  for (auto& c : j.counts_) {
    c.canonicalize();
    if (c < 0) throw InputError("negative count " + c.get_str());
    j.total_ += c;
  }
  if (j.total_ <= 0) throw InputError("table has zero total count");
  return j;
}

Rational DiscreteJoint::mass(std::size_t x, const WCondition& cond) const {
  Rational m = 0;
  for (std::size_t y = 0; y < ny(); ++y)
    for (std::size_t w = 0; w < nw(); ++w)
      if (cond.contains(w)) m += count(y, x, w);
  return m;
}

Rational DiscreteJoint::conditional_prob(std::span<const std::size_t> ys, std::size_t x,
                                         const WCondition& cond) const {
  const Rational denom = mass(x, cond);
  if (denom == 0) {
    throw DomainError("conditioning on null event: X=" + levels_x_.at(x) + ", " + describe_w(cond) +
                      " has zero mass");
  }
  std::vector<bool> in_event(ny(), false);
  for (std::size_t y : ys) in_event.at(y) = true;
  Rational num = 0;
  for (std::size_t y = 0; y < ny(); ++y) {
    if (!in_event[y]) continue;
    for (std::size_t w = 0; w < nw(); ++w)
      if (cond.contains(w)) num += count(y, x, w);
  }
  return num / denom;
}

Rational DiscreteJoint::cdf(std::size_t y, std::size_t x, const WCondition& cond) const {
  std::vector<std::size_t> below(y + 1);
  for (std::size_t k = 0; k <= y; ++k) below[k] = k;
  return conditional_prob(below, x, cond);
}

Rational DiscreteJoint::prob_w_given_x(std::size_t w, std::size_t x) const {
  const Rational denom = mass(x, WCondition::marginal());
  if (denom == 0) throw DomainError("conditioning on null event: X=" + levels_x_.at(x) + " has zero mass");
  return mass(x, WCondition::level(w)) / denom;
}

Rational DiscreteJoint::prob_w(std::size_t w) const {
  Rational m = 0;
  for (std::size_t x = 0; x < nx(); ++x) m += mass(x, WCondition::level(w));
  return m / total_;
}

std::string DiscreteJoint::describe_w(const WCondition& cond) const {
  if (cond.is_marginal()) return "W marginal";
  if (cond.levels().size() == 1) return "W=" + levels_w_.at(cond.levels()[0]);
  std::string s = "W in {";
  for (std::size_t k = 0; k < cond.levels().size(); ++k) {
    if (k) s += ",";
    s += levels_w_.at(cond.levels()[k]);
  }
  return s + "}";
}

// ---------------------------------------------------------------------------

void EvalGrid::validate() const {
  auto check = [](const std::vector<double>& v, const char* axis) {
    if (v.empty()) throw InputError(std::string("evaluation grid axis ") + axis + " is empty");
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (!std::isfinite(v[k])) throw InputError(std::string("non-finite grid value on axis ") + axis);
      if (k && !(v[k] > v[k - 1]))
        throw InputError(std::string("evaluation grid axis ") + axis + " is not strictly increasing");
    }
  };
  check(ys, "y");
  check(xs, "x");
  check(ws, "w");
}

void EvalGrid::validate(const ContinuousModel& model) const {
  validate();
  const Interval sx = model.support_x();
  for (double x : xs) {
    if (!sx.contains(x)) {
      std::ostringstream msg;
      msg << "grid x=" << x << " outside X support [" << sx.lo << ", " << sx.hi << "] of family " << model.family();
      throw InputError(msg.str());
    }
    const Interval sw = model.support_w(x);
    for (double w : ws) {
      if (!sw.contains(w)) {
        std::ostringstream msg;
        msg << "grid w=" << w << " outside W support [" << sw.lo << ", " << sw.hi << "] at x=" << x;
        throw InputError(msg.str());
      }
    }
  }
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {0.5 * (lo + hi)};
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  return v;
}

Interval smooth_x_piece(const ContinuousModel& model, double x) {
  Interval piece = model.support_x();
  for (double b : model.x_breakpoints()) {
    if (b < x) piece.lo = std::max(piece.lo, b);
    if (b > x) piece.hi = std::min(piece.hi, b);
  }
  return piece;
}

std::vector<double> w_breakpoints_within(const ContinuousModel& model, double y, double x) {
  std::vector<double> bps = model.w_breakpoints(y, x);
  const Interval sw = model.support_w(x);
  std::erase_if(bps, [&](double b) { return !(b > sw.lo && b < sw.hi); });
  std::sort(bps.begin(), bps.end());
  return bps;
}

double marginal_cdf_y(const ContinuousModel& model, double y, double x, const NumericOptions& opts) {
  const Interval sy = model.support_y_marginal(x);
  if (y <= sy.lo) return 0.0;
  if (y >= sy.hi) return 1.0;
  const auto bps = w_breakpoints_within(model, y, x);
  auto r = num::integrate([&](double w) { return model.cdf_y(y, x, w) * model.pdf_w(w, x); }, model.support_w(x),
                          opts.quadrature, bps);
  const double slack = std::max(1e-9, 10.0 * r.error);
  if (r.value < -slack || r.value > 1.0 + slack)
    throw NumericalError("marginal CDF outside [0,1] beyond quadrature tolerance", r.value, r.error);
  return std::clamp(r.value, 0.0, 1.0);
}

double marginal_pdf_y(const ContinuousModel& model, double y, double x, const NumericOptions& opts) {
  const Interval sy = model.support_y_marginal(x);
  if (y < sy.lo || y > sy.hi) return 0.0;
  const auto bps = w_breakpoints_within(model, y, x);
  auto r = num::integrate([&](double w) { return model.pdf_y(y, x, w) * model.pdf_w(w, x); }, model.support_w(x),
                          opts.quadrature, bps);
  return std::max(r.value, 0.0);
}

double posterior_w_density(const ContinuousModel& model, double w, double y, double x, const NumericOptions& opts) {
  const double fy = marginal_pdf_y(model, y, x, opts);
  if (!(fy > opts.density_floor)) {
    std::ostringstream msg;
    msg << "conditioning on null event: f(y|x) = " << fy << " at y=" << y << ", x=" << x;
    throw DomainError(msg.str());
  }
  if (!model.support_w(x).contains(w)) return 0.0;
  return model.pdf_y(y, x, w) * model.pdf_w(w, x) / fy;
}

}  // namespace collapse

namespace collapse {

EvalGrid auto_grid(const ContinuousModel& model, std::size_t ny, std::size_t nx, std::size_t nw,
                   const NumericOptions& opts) {
  if (ny == 0 || nx == 0 || nw == 0) throw InputError("automatic grid sizes must be positive");
  EvalGrid grid;
  const Interval xr = model.preferred_x_range();
  grid.xs = linspace(xr.lo, xr.hi, nx);

  // Common interior band of a family of quantile curves; falls back to the
  // union when the intersection is empty.
  auto band = [&](auto&& quantile) {
    double lo_max = -std::numeric_limits<double>::infinity(), hi_min = std::numeric_limits<double>::infinity();
    double lo_min = hi_min, hi_max = lo_max;
    for (double x : grid.xs) {
      const double a = quantile(0.1, x), b = quantile(0.9, x);
      lo_max = std::max(lo_max, a);
      lo_min = std::min(lo_min, a);
      hi_min = std::min(hi_min, b);
      hi_max = std::max(hi_max, b);
    }
    return lo_max < hi_min ? Interval{lo_max, hi_min} : Interval{lo_min, hi_max};
  };

  const Interval yr = band([&](double eta, double x) {
    return num::invert_cdf([&](double y) { return marginal_cdf_y(model, y, x, opts); }, eta,
                           model.support_y_marginal(x));
  });
  const Interval wr = band([&](double eta, double x) {
    return num::invert_cdf([&](double w) { return model.cdf_w(w, x); }, eta, model.support_w(x));
  });
  grid.ys = linspace(yr.lo, yr.hi, ny);
  grid.ws = linspace(wr.lo, wr.hi, nw);
  return grid;
}

}  // namespace collapse
