#pragma once

#include <optional>
#include <vector>

#include "collapse/collapse.hpp"

namespace collapse {

// q_x(y|x,w) = -F_x(y|x,w) / f(y|x,w), or q_x(y|x) when w is empty.
// Throws DomainError "quantile coefficient undefined (null density)".
double quantile_coeff_x(const ContinuousModel& model, double y, double x, std::optional<double> w,
                        const NumericOptions& opts = {});
// q_w(y|x,w) = -F_w(y|x,w) / f(y|x,w).
double quantile_coeff_w(const ContinuousModel& model, double y, double x, double w, const NumericOptions& opts = {});
// q_x(w|x) = -F_x(w|x) / f(w|x).
double quantile_coeff_wx(const ContinuousModel& model, double w, double x, const NumericOptions& opts = {});

// delta(y|x,w) = q_x(y|x,w) + q_w(y|x,w) q_x(w|x).
double total_effect(const ContinuousModel& model, double y, double x, double w, const NumericOptions& opts = {});

// Everything the posterior-expectation identities need at one (y, x). The
// posterior expectations share one set of quadrature nodes with their
// normalizer int f(y|x,w) f(w|x) dw.
struct PosteriorTerms {
  double q_x_marginal = 0.0;      // -F_x(y|x) / f(y|x), finite differences
  double expected_q_x = 0.0;      // E_{W|y,x} q_x(y|x,W)
  double expected_product = 0.0;  // E_{W|y,x} q_w(y|x,W) q_x(W|x)
  double criterion = 0.0;         // int F_w(y|x,w) F_x(w|x) dw
  double normalizer = 0.0;        // f(y|x)

  double expected_delta() const { return expected_q_x + expected_product; }
  double cox_residual() const { return q_x_marginal - expected_delta(); }
};

PosteriorTerms posterior_terms(const ContinuousModel& model, double y, double x, const NumericOptions& opts = {});

// q_x(y|x) - E_{W|y,x} delta(y|x,W).
double cox_identity_residual(const ContinuousModel& model, double y, double x, const NumericOptions& opts = {});

// int F_w(y|x,w) F_x(w|x) dw.
double criterion_integral(const ContinuousModel& model, double y, double x, const NumericOptions& opts = {});

// True when (y, x) keeps two differencing steps away from the support edges.
bool quantile_interior(const ContinuousModel& model, double y, double x, const NumericOptions& opts = {});

struct QuantileACollapsibility {
  Verdict verdict;               // max |q_x(y|x) - E_{W|y,x} q_x(y|x,W)|
  double max_product_form = 0.0;  // max |E_{W|y,x} q_w q_x(W|x)|
  double max_form_gap = 0.0;      // max over points of the difference of the two forms
};

QuantileACollapsibility check_A_collapsibility_quantile(const ContinuousModel& model, const CheckContext& ctx);

// Verdict on max |criterion_integral| over the interior grid.
Verdict check_criterion(const ContinuousModel& model, const CheckContext& ctx);

// Sampled coefficients. Indexing as in DependenceField: marginal [iy][ix],
// conditional [iy][ix][iw], q_x_w [ix][iw]. Undefined points are NaN.
struct QuantileProfile {
  EvalGrid grid;
  std::vector<double> q_x_marginal;
  std::vector<double> q_x_cond;
  std::vector<double> q_w_cond;
  std::vector<double> q_x_w;
  std::vector<double> delta;

  std::size_t at_yx(std::size_t iy, std::size_t ix) const { return iy * grid.xs.size() + ix; }
  std::size_t at_yxw(std::size_t iy, std::size_t ix, std::size_t iw) const {
    return (iy * grid.xs.size() + ix) * grid.ws.size() + iw;
  }
  std::size_t at_xw(std::size_t ix, std::size_t iw) const { return ix * grid.ws.size() + iw; }
};

QuantileProfile quantile_profile(const ContinuousModel& model, const EvalGrid& grid, const NumericOptions& opts = {},
                                 Execution exec = Execution::parallel);

// q_w(y|x,w) q_x(w|x) on the grid, [iy][ix][iw]; NaN where undefined.
std::vector<double> pointwise_product_field(const ContinuousModel& model, const EvalGrid& grid,
                                            const NumericOptions& opts = {}, Execution exec = Execution::parallel);

// For families declared conditionally complete and quantile A-collapsible,
// the pointwise product must vanish. Not applicable otherwise.
Verdict check_product_vanishes(const ContinuousModel& model, const CheckContext& ctx);

// Where delta(y|x,w) does not vary over the grid w, q_x(y|x) must equal it.
Verdict check_delta_w_free(const ContinuousModel& model, const CheckContext& ctx);

// y_eta with F(y_eta|x[,w]) = eta.
double quantile_function(const ContinuousModel& model, double eta, double x, std::optional<double> w,
                         const NumericOptions& opts = {});

struct QuantileSlope {
  double y_eta = 0.0;
  double slope = 0.0;  // d y_eta / dx by finite differences
  double q_x = 0.0;    // q_x(y_eta | x[,w])
};

QuantileSlope quantile_slope(const ContinuousModel& model, double eta, double x, std::optional<double> w,
                             const NumericOptions& opts = {});

}  // namespace collapse
