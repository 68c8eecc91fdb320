#pragma once

#include <optional>
#include <string>
#include <vector>

#include "collapse/model.hpp"
#include "collapse/parallel.hpp"

namespace collapse {

enum class DepKind { distribution, density };
enum class DepScope { conditional, marginal };
enum class DepMethod { analytic, finite_difference, one_sided, adjacent_difference, undefined };

const char* to_string(DepKind k);
const char* to_string(DepScope s);
const char* to_string(DepMethod m);

struct DepValue {
  double value = 0.0;
  DepMethod method = DepMethod::analytic;
  double error_proxy = 0.0;
};

// P(Y <= y | i+1, cond) - P(Y <= y | i, cond) with 0-based X index i.
// Throws DomainError naming the empty cell when either event has zero mass.
Rational dist_dep_discrete(const DiscreteJoint& joint, std::size_t y, std::size_t i, const WCondition& cond);

// dF(y|x,w)/dx, or dF(y|x)/dx when w is empty.
DepValue dist_dep(const ContinuousModel& model, double y, double x, std::optional<double> w,
                  const NumericOptions& opts = {});

// df(y|x,w)/dx, or df(y|x)/dx when w is empty. Throws DomainError
// "non-differentiable point" when the density jumps by more than 10% across
// one differencing step.
DepValue density_dep(const ContinuousModel& model, double y, double x, std::optional<double> w,
                     const NumericOptions& opts = {});

// F_x(y|x,w) and F_x(w|x), analytic when the family has them.
double cdf_y_dx(const ContinuousModel& model, double y, double x, double w, const NumericOptions& opts);
double cdf_y_dw(const ContinuousModel& model, double y, double x, double w, const NumericOptions& opts);
double pdf_y_dx(const ContinuousModel& model, double y, double x, double w, const NumericOptions& opts);
double pdf_w_dx(const ContinuousModel& model, double w, double x, const NumericOptions& opts);
double cdf_w_dx(const ContinuousModel& model, double w, double x, const NumericOptions& opts);

struct Decomposition {
  double term_avg = 0.0;       // int F_x(y|x,w) f(w|x) dw
  double term_residual = 0.0;  // int F(y|x,w) f_x(w|x) dw
  double error = 0.0;
};

Decomposition decomposition_terms(const ContinuousModel& model, double y, double x, const NumericOptions& opts = {});

// Sampled dependence function. Conditional values are indexed
// [iy][ix][iw], marginal values [iy][ix]. Points where the function is
// undefined hold NaN with method `undefined` and a note.
struct DependenceField {
  DepKind kind = DepKind::distribution;
  DepScope scope = DepScope::conditional;
  EvalGrid grid;
  std::vector<double> values;
  std::vector<DepMethod> methods;
  std::vector<std::string> notes;

  std::size_t index(std::size_t iy, std::size_t ix, std::size_t iw = 0) const {
    const std::size_t nw = scope == DepScope::conditional ? grid.ws.size() : 1;
    return (iy * grid.xs.size() + ix) * nw + iw;
  }
  double at(std::size_t iy, std::size_t ix, std::size_t iw = 0) const { return values[index(iy, ix, iw)]; }
  std::size_t undefined_count() const;
};

DependenceField dependence_field(const ContinuousModel& model, const EvalGrid& grid, DepKind kind, DepScope scope,
                                 const NumericOptions& opts = {}, Execution exec = Execution::parallel);

// Every adjacent-level distribution dependence of a table, exact. Rows are
// the Y levels below the top one (whose CDF is identically 1).
struct DiscreteDependence {
  std::size_t ny = 0, ni = 0, nw = 0;
  std::vector<std::optional<Rational>> conditional;  // [y][i][w]
  std::vector<std::optional<Rational>> marginal;     // [y][i]
  std::vector<std::string> notes;

  const std::optional<Rational>& cond(std::size_t y, std::size_t i, std::size_t w) const {
    return conditional[(y * ni + i) * nw + w];
  }
  const std::optional<Rational>& marg(std::size_t y, std::size_t i) const { return marginal[y * ni + i]; }
};

DiscreteDependence discrete_dependence(const DiscreteJoint& joint);

}  // namespace collapse
