#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "collapse/model.hpp"

namespace collapse {

using ParamMap = std::map<std::string, double>;

// Y|x,w ~ U(0, 1/g) with g = x^2 + (w-x)^2, W|x ~ N(x, w_sd^2).
// F(y|x,w) = min(1, y g) on y > 0.
class UniformQuadratic final : public ContinuousModel {
 public:
  explicit UniformQuadratic(double w_sd = 1.0, double truncation_sd = 8.0);

  std::string family() const override { return "uniform-quadratic"; }
  std::vector<std::pair<std::string, double>> parameters() const override;

  double cdf_y(double y, double x, double w) const override;
  double pdf_y(double y, double x, double w) const override;
  double pdf_w(double w, double x) const override;
  double cdf_w(double w, double x) const override;

  Interval support_x() const override;
  Interval support_y(double x, double w) const override;
  Interval support_w(double x) const override;
  Interval support_y_marginal(double x) const override;
  std::vector<double> w_breakpoints(double y, double x) const override;

  std::optional<double> cdf_y_dx(double y, double x, double w) const override;
  std::optional<double> cdf_y_dw(double y, double x, double w) const override;
  std::optional<double> pdf_y_dx(double y, double x, double w) const override;
  std::optional<double> pdf_w_dx(double w, double x) const override;
  std::optional<double> cdf_w_dx(double w, double x) const override;

  bool clamped() const override { return true; }
  Interval preferred_x_range() const override { return {0.25, 1.0}; }

 private:
  double scale(double x, double w) const { return x * x + (w - x) * (w - x); }
  bool inside(double y, double x, double w) const { return y > 0.0 && y * scale(x, w) < 1.0; }

  double w_sd_;
  double truncation_sd_;
};

// Y|x,w ~ U(w-x, w+x), W|x ~ N(w_shift, x^2), x > 0.
class UniformShift final : public ContinuousModel {
 public:
  explicit UniformShift(double w_shift = 0.0, double truncation_sd = 8.0);

  std::string family() const override { return "uniform-shift"; }
  std::vector<std::pair<std::string, double>> parameters() const override;

  double cdf_y(double y, double x, double w) const override;
  double pdf_y(double y, double x, double w) const override;
  double pdf_w(double w, double x) const override;
  double cdf_w(double w, double x) const override;

  Interval support_x() const override;
  Interval support_y(double x, double w) const override;
  Interval support_w(double x) const override;
  Interval support_y_marginal(double x) const override;
  std::vector<double> w_breakpoints(double y, double x) const override;

  std::optional<double> cdf_y_dx(double y, double x, double w) const override;
  std::optional<double> cdf_y_dw(double y, double x, double w) const override;
  std::optional<double> pdf_y_dx(double y, double x, double w) const override;
  std::optional<double> pdf_w_dx(double w, double x) const override;
  std::optional<double> cdf_w_dx(double w, double x) const override;

  bool clamped() const override { return true; }
  Interval preferred_x_range() const override { return {0.5, 2.0}; }

 private:
  bool inside(double y, double x, double w) const { return std::abs(y - w) < x; }

  double w_shift_;
  double truncation_sd_;
};

struct GaussianLinearParams {
  double alpha1 = 1.0;
  double alpha2 = 0.5;
  double alpha3 = 0.5;
  double sigma = 1.0;
  double w_mean = 0.0;   // W|x ~ N(w_mean + w_slope x, w_sd^2)
  double w_slope = 1.0;
  double w_sd = 1.0;
  double truncation_sd = 8.0;
};

// Y = alpha1 x + alpha2 w + alpha3 x w + sigma eps, W|x Gaussian with mean
// linear in x. Backs the `linear-interaction`, `ci-yw` (alpha2 = alpha3 = 0)
// and `indep-xw` (w_slope = 0) tags.
class GaussianLinear final : public ContinuousModel {
 public:
  GaussianLinear(std::string tag, const GaussianLinearParams& p);

  std::string family() const override { return tag_; }
  std::vector<std::pair<std::string, double>> parameters() const override;
  const GaussianLinearParams& params() const { return p_; }

  double cdf_y(double y, double x, double w) const override;
  double pdf_y(double y, double x, double w) const override;
  double pdf_w(double w, double x) const override;
  double cdf_w(double w, double x) const override;

  Interval support_x() const override;
  Interval support_y(double x, double w) const override;
  Interval support_w(double x) const override;
  Interval support_y_marginal(double x) const override;

  std::optional<double> cdf_y_dx(double y, double x, double w) const override;
  std::optional<double> cdf_y_dw(double y, double x, double w) const override;
  std::optional<double> pdf_y_dx(double y, double x, double w) const override;
  std::optional<double> pdf_w_dx(double w, double x) const override;
  std::optional<double> cdf_w_dx(double w, double x) const override;

  bool posterior_complete() const override { return true; }
  Interval preferred_x_range() const override { return {-1.0, 1.0}; }

  double mean_y(double x, double w) const { return p_.alpha1 * x + p_.alpha2 * w + p_.alpha3 * x * w; }
  double mean_w(double x) const { return p_.w_mean + p_.w_slope * x; }

 private:
  std::string tag_;
  GaussianLinearParams p_;
};

// Tabulated model: F(y|x,w) on an (x, w, y) lattice and F(w|x) on (x, w).
// Piecewise linear in every coordinate, so densities are piecewise constant.
// d/dx uses the segment slope inside a cell, central differences on the
// tabulated axis at interior nodes and one-sided differences at edge nodes.
class GridModel final : public ContinuousModel {
 public:
  struct Data {
    std::vector<double> xs, ws, ys;
    std::vector<double> cdf_y;  // [ix][iw][iy]
    std::vector<double> cdf_w;  // [ix][iw]
  };

  explicit GridModel(Data data);

  // Tabulates any model on the given nodes, renormalizing the truncated
  // CDFs so they run from 0 to 1.
  static GridModel tabulate(const ContinuousModel& model, std::vector<double> xs, std::vector<double> ws,
                            std::vector<double> ys);

  std::string family() const override { return "grid"; }
  std::vector<std::pair<std::string, double>> parameters() const override;
  const Data& data() const { return d_; }

  double cdf_y(double y, double x, double w) const override;
  double pdf_y(double y, double x, double w) const override;
  double pdf_w(double w, double x) const override;
  double cdf_w(double w, double x) const override;

  Interval support_x() const override;
  Interval support_y(double x, double w) const override;
  Interval support_w(double x) const override;
  Interval support_y_marginal(double x) const override;
  std::vector<double> w_breakpoints(double y, double x) const override;
  std::vector<double> x_breakpoints() const override { return d_.xs; }
  Interval preferred_x_range() const override { return {d_.xs.front(), d_.xs.back()}; }

  std::optional<double> cdf_y_dx(double y, double x, double w) const override;
  std::optional<double> cdf_y_dw(double y, double x, double w) const override;
  std::optional<double> pdf_y_dx(double y, double x, double w) const override;
  std::optional<double> pdf_w_dx(double w, double x) const override;
  std::optional<double> cdf_w_dx(double w, double x) const override;

  // True at the first and last tabulated x, where d/dx is one-sided.
  bool one_sided_x(double x) const override;

 private:
  struct Stencil {
    std::array<std::size_t, 3> index{};
    std::array<double, 3> weight{};
    int size = 0;
  };
  Stencil value_stencil(const std::vector<double>& axis, double v) const;
  Stencil slope_stencil(const std::vector<double>& axis, double v) const;
  // Density stencils: slope of the cell to the right of v (left at the end).
  Stencil cell_slope_stencil(const std::vector<double>& axis, double v) const;

  double fy(std::size_t ix, std::size_t iw, std::size_t iy) const {
    return d_.cdf_y[(ix * d_.ws.size() + iw) * d_.ys.size() + iy];
  }
  double fw(std::size_t ix, std::size_t iw) const { return d_.cdf_w[ix * d_.ws.size() + iw]; }
  double combine_y(const Stencil& sx, const Stencil& sw, const Stencil& sy) const;
  double combine_w(const Stencil& sx, const Stencil& sw) const;
  void require_x(double x) const;

  Data d_;
};

// Names accepted by make_model.
std::vector<std::string> builtin_families();

// Builds a parametric family from a tag and parameter map. Unknown tags,
// unknown parameter names and out-of-range values throw InputError.
ModelPtr make_model(const std::string& family, const ParamMap& params = {});

}  // namespace collapse
