#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "collapse/numerics.hpp"
#include "collapse/rational.hpp"

namespace collapse {

using num::Interval;
using num::NumericOptions;

// ---------------------------------------------------------------------------
// Discrete three-way tables
// ---------------------------------------------------------------------------

enum class LevelOrder {
  numeric_lexicographic,  // numeric labels by value, then the rest lexicographically
  first_appearance,
};

struct LevelOrdering {
  LevelOrder order = LevelOrder::numeric_lexicographic;
  // Explicit orderings override `order` for that axis when non-empty.
  std::vector<std::string> y, x, w;
};

struct TableRow {
  std::string y, x, w;
  Rational count;
};

// Conditioning set on W: a single level, a set of levels, or all of them.
class WCondition {
 public:
  static WCondition marginal() { return WCondition{}; }
  static WCondition level(std::size_t w) { return WCondition({w}); }
  static WCondition set(std::vector<std::size_t> levels);

  bool is_marginal() const { return !levels_.has_value(); }
  bool contains(std::size_t w) const;
  const std::vector<std::size_t>& levels() const { return *levels_; }

 private:
  WCondition() = default;
  explicit WCondition(std::vector<std::size_t> levels) : levels_(std::move(levels)) {}
  std::optional<std::vector<std::size_t>> levels_;
};

class DiscreteJoint {
 public:
  // Duplicate (y, x, w) keys are summed. Throws InputError on a negative
  // count (naming the row), a zero total, or fewer than two X levels.
  static DiscreteJoint build(std::span<const TableRow> rows, const LevelOrdering& ordering = {});

  // Dense construction; counts indexed [y][x][w] flattened as y*nx*nw + x*nw + w.
  static DiscreteJoint from_counts(std::vector<std::string> levels_y, std::vector<std::string> levels_x,
                                   std::vector<std::string> levels_w, std::vector<Rational> counts);

  std::size_t ny() const { return levels_y_.size(); }
  std::size_t nx() const { return levels_x_.size(); }
  std::size_t nw() const { return levels_w_.size(); }
  const std::vector<std::string>& levels_y() const { return levels_y_; }
  const std::vector<std::string>& levels_x() const { return levels_x_; }
  const std::vector<std::string>& levels_w() const { return levels_w_; }

  const Rational& count(std::size_t y, std::size_t x, std::size_t w) const {
    return counts_[(y * nx() + x) * nw() + w];
  }
  const Rational& total() const { return total_; }
  Rational joint(std::size_t y, std::size_t x, std::size_t w) const { return count(y, x, w) / total_; }

  // Mass of {X = x, W in cond} (unnormalized counts).
  Rational mass(std::size_t x, const WCondition& cond) const;

  // P(Y in ys | X = x, W in cond). Throws DomainError on a zero-mass event.
  Rational conditional_prob(std::span<const std::size_t> ys, std::size_t x, const WCondition& cond) const;

  // P(Y <= level y | X = x, W in cond).
  Rational cdf(std::size_t y, std::size_t x, const WCondition& cond) const;

  Rational prob_w_given_x(std::size_t w, std::size_t x) const;
  Rational prob_w(std::size_t w) const;

  std::string describe_w(const WCondition& cond) const;

 private:
  std::vector<std::string> levels_y_, levels_x_, levels_w_;
  std::vector<Rational> counts_;
  Rational total_;
};

// ---------------------------------------------------------------------------
// Continuous models
// ---------------------------------------------------------------------------

// F(y|x,w), f(y|x,w), f(w|x), F(w|x) with declared supports. Implementations
// are immutable and safe to share across threads.
class ContinuousModel {
 public:
  virtual ~ContinuousModel() = default;

  virtual std::string family() const = 0;
  virtual std::vector<std::pair<std::string, double>> parameters() const = 0;

  virtual double cdf_y(double y, double x, double w) const = 0;
  virtual double pdf_y(double y, double x, double w) const = 0;
  virtual double pdf_w(double w, double x) const = 0;
  virtual double cdf_w(double w, double x) const = 0;

  virtual Interval support_x() const = 0;
  virtual Interval support_y(double x, double w) const = 0;
  // Effective (truncated) W support used for quadrature.
  virtual Interval support_w(double x) const = 0;
  // Hull of the Y support over the effective W support.
  virtual Interval support_y_marginal(double x) const = 0;

  // Points in w where the integrands of marginalization have kinks or jumps
  // (support edges of Y|x,w as a function of w, tabulation nodes).
  virtual std::vector<double> w_breakpoints(double /*y*/, double /*x*/) const { return {}; }
  // Points in x where the model is only piecewise smooth.
  virtual std::vector<double> x_breakpoints() const { return {}; }
  // True where d/dx of the model is a one-sided difference (tabulation edges).
  virtual bool one_sided_x(double /*x*/) const { return false; }
  // Range of x used for automatic evaluation grids.
  virtual Interval preferred_x_range() const = 0;

  // Closed-form partial derivatives; nullopt when the family has none.
  virtual std::optional<double> cdf_y_dx(double, double, double) const { return std::nullopt; }
  virtual std::optional<double> cdf_y_dw(double, double, double) const { return std::nullopt; }
  virtual std::optional<double> pdf_y_dx(double, double, double) const { return std::nullopt; }
  virtual std::optional<double> pdf_w_dx(double, double) const { return std::nullopt; }
  virtual std::optional<double> cdf_w_dx(double, double) const { return std::nullopt; }

  // True when Y|x,w is a support-clamped family (identities checked looser).
  virtual bool clamped() const { return false; }
  // True when {F(w|y,x)} is a complete family (exponential-family posterior).
  virtual bool posterior_complete() const { return false; }
};

using ModelPtr = std::shared_ptr<const ContinuousModel>;

// Forwards everything except the closed-form derivatives, so every
// derivative of the wrapped model is taken numerically.
class WithoutDerivatives final : public ContinuousModel {
 public:
  explicit WithoutDerivatives(const ContinuousModel& inner) : inner_(inner) {}

  std::string family() const override { return inner_.family(); }
  std::vector<std::pair<std::string, double>> parameters() const override { return inner_.parameters(); }
  double cdf_y(double y, double x, double w) const override { return inner_.cdf_y(y, x, w); }
  double pdf_y(double y, double x, double w) const override { return inner_.pdf_y(y, x, w); }
  double pdf_w(double w, double x) const override { return inner_.pdf_w(w, x); }
  double cdf_w(double w, double x) const override { return inner_.cdf_w(w, x); }
  Interval support_x() const override { return inner_.support_x(); }
  Interval support_y(double x, double w) const override { return inner_.support_y(x, w); }
  Interval support_w(double x) const override { return inner_.support_w(x); }
  Interval support_y_marginal(double x) const override { return inner_.support_y_marginal(x); }
  std::vector<double> w_breakpoints(double y, double x) const override { return inner_.w_breakpoints(y, x); }
  std::vector<double> x_breakpoints() const override { return inner_.x_breakpoints(); }
  bool one_sided_x(double x) const override { return inner_.one_sided_x(x); }
  Interval preferred_x_range() const override { return inner_.preferred_x_range(); }
  bool clamped() const override { return inner_.clamped(); }
  bool posterior_complete() const override { return inner_.posterior_complete(); }

 private:
  const ContinuousModel& inner_;
};

struct EvalGrid {
  std::vector<double> ys;
  std::vector<double> xs;
  std::vector<double> ws;

  // Throws InputError unless every axis is nonempty and strictly increasing.
  void validate() const;
  // Additionally requires every point to lie inside the model's supports.
  void validate(const ContinuousModel& model) const;
};

std::vector<double> linspace(double lo, double hi, std::size_t n);

// Interior grid: x over the preferred range, y between the 10% and 90%
// marginal quantiles common to every grid x, w between the 10% and 90%
// quantiles of W|x common to every grid x.
EvalGrid auto_grid(const ContinuousModel& model, std::size_t ny = 25, std::size_t nx = 25, std::size_t nw = 7,
                   const NumericOptions& opts = {});

// Smooth piece of the X support containing x (between x breakpoints).
Interval smooth_x_piece(const ContinuousModel& model, double x);

// F(y|x) = int F(y|x,w) f(w|x) dw.
double marginal_cdf_y(const ContinuousModel& model, double y, double x, const NumericOptions& opts = {});

// f(y|x) = int f(y|x,w) f(w|x) dw.
double marginal_pdf_y(const ContinuousModel& model, double y, double x, const NumericOptions& opts = {});

// f(w|y,x) = f(y|x,w) f(w|x) / f(y|x). Throws DomainError when f(y|x) = 0.
double posterior_w_density(const ContinuousModel& model, double w, double y, double x,
                           const NumericOptions& opts = {});

// Breakpoints of the model plus the integration interval for w at (y, x).
std::vector<double> w_breakpoints_within(const ContinuousModel& model, double y, double x);

}  // namespace collapse
