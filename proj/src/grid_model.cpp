#include <algorithm>
#include <cmath>
#include <sstream>

#include "collapse/error.hpp"
#include "collapse/families.hpp"

namespace collapse {

namespace {

void check_axis(const std::vector<double>& axis, const char* name) {
  if (axis.size() < 2) throw InputError(std::string("grid axis ") + name + " needs at least 2 nodes");
  for (std::size_t k = 0; k < axis.size(); ++k) {
    if (!std::isfinite(axis[k])) throw InputError(std::string("non-finite node on grid axis ") + name);
    if (k && !(axis[k] > axis[k - 1]))
      throw InputError(std::string("grid axis ") + name + " is not strictly increasing");
  }
}

// Nondecreasing run from 0 to 1; endpoints within 1e-9 are snapped.
void check_cdf_run(double* v, std::size_t n, std::size_t stride, const std::string& where) {
  constexpr double slack = 1e-9;
  for (std::size_t k = 0; k < n; ++k) {
    double& c = v[k * stride];
    if (!std::isfinite(c) || c < -slack || c > 1.0 + slack) throw InputError("CDF value outside [0,1] at " + where);
    if (k && c < v[(k - 1) * stride] - slack) throw InputError("CDF not nondecreasing at " + where);
  }
  if (std::abs(v[0]) > slack || std::abs(v[(n - 1) * stride] - 1.0) > slack)
    throw InputError("CDF must run from 0 to 1 over the tabulated axis at " + where);
  v[0] = 0.0;
  v[(n - 1) * stride] = 1.0;
  for (std::size_t k = 0; k < n; ++k) v[k * stride] = std::clamp(v[k * stride], 0.0, 1.0);
}

// Index k of the cell [axis[k], axis[k+1]) holding v, clamped to valid cells.
std::size_t cell_of(const std::vector<double>& axis, double v) {
  auto it = std::upper_bound(axis.begin(), axis.end(), v);
  const auto k = static_cast<std::ptrdiff_t>(it - axis.begin()) - 1;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(axis.size()) - 2));
}

}  // namespace

GridModel::GridModel(Data data) : d_(std::move(data)) {
  check_axis(d_.xs, "x");
  check_axis(d_.ws, "w");
  check_axis(d_.ys, "y");
  const std::size_t nx = d_.xs.size(), nw = d_.ws.size(), ny = d_.ys.size();
  if (d_.cdf_y.size() != nx * nw * ny)
    throw InputError("grid cdf_y has " + std::to_string(d_.cdf_y.size()) + " values, expected nx*nw*ny = " +
                     std::to_string(nx * nw * ny));
  if (d_.cdf_w.size() != nx * nw)
    throw InputError("grid cdf_w has " + std::to_string(d_.cdf_w.size()) + " values, expected nx*nw = " +
                     std::to_string(nx * nw));
  for (std::size_t ix = 0; ix < nx; ++ix) {
    std::ostringstream where;
    where << "x=" << d_.xs[ix];
    check_cdf_run(&d_.cdf_w[ix * nw], nw, 1, "cdf_w " + where.str());
    for (std::size_t iw = 0; iw < nw; ++iw) {
      std::ostringstream at;
      at << "cdf_y x=" << d_.xs[ix] << ", w=" << d_.ws[iw];
      check_cdf_run(&d_.cdf_y[(ix * nw + iw) * ny], ny, 1, at.str());
    }
  }
}

GridModel GridModel::tabulate(const ContinuousModel& model, std::vector<double> xs, std::vector<double> ws,
                              std::vector<double> ys) {
  check_axis(xs, "x");
  check_axis(ws, "w");
  check_axis(ys, "y");
  Data d;
  d.cdf_w.reserve(xs.size() * ws.size());
  d.cdf_y.reserve(xs.size() * ws.size() * ys.size());
  for (double x : xs) {
    const double w0 = model.cdf_w(ws.front(), x);
    const double w1 = model.cdf_w(ws.back(), x);
    if (!(w1 > w0)) throw InputError("tabulation w range carries no W mass");
    for (double w : ws) d.cdf_w.push_back((model.cdf_w(w, x) - w0) / (w1 - w0));
    for (double w : ws) {
      const double y0 = model.cdf_y(ys.front(), x, w);
      const double y1 = model.cdf_y(ys.back(), x, w);
      if (!(y1 > y0)) throw InputError("tabulation y range carries no Y mass");
      for (double y : ys) d.cdf_y.push_back((model.cdf_y(y, x, w) - y0) / (y1 - y0));
    }
  }
  d.xs = std::move(xs);
  d.ws = std::move(ws);
  d.ys = std::move(ys);
  return GridModel(std::move(d));
}

std::vector<std::pair<std::string, double>> GridModel::parameters() const {
  return {{"nx", static_cast<double>(d_.xs.size())},
          {"nw", static_cast<double>(d_.ws.size())},
          {"ny", static_cast<double>(d_.ys.size())}};
}

GridModel::Stencil GridModel::value_stencil(const std::vector<double>& axis, double v) const {
  Stencil s;
  if (v <= axis.front()) {
    s.index[0] = 0;
    s.weight[0] = 1.0;
    s.size = 1;
    return s;
  }
  if (v >= axis.back()) {
    s.index[0] = axis.size() - 1;
    s.weight[0] = 1.0;
    s.size = 1;
    return s;
  }
  const std::size_t k = cell_of(axis, v);
  const double t = (v - axis[k]) / (axis[k + 1] - axis[k]);
  s.index = {k, k + 1, 0};
  s.weight = {1.0 - t, t, 0.0};
  s.size = 2;
  return s;
}

GridModel::Stencil GridModel::cell_slope_stencil(const std::vector<double>& axis, double v) const {
  const std::size_t k = cell_of(axis, v);
  const double h = axis[k + 1] - axis[k];
  Stencil s;
  s.index = {k, k + 1, 0};
  s.weight = {-1.0 / h, 1.0 / h, 0.0};
  s.size = 2;
  return s;
}

GridModel::Stencil GridModel::slope_stencil(const std::vector<double>& axis, double v) const {
  const auto it = std::find(axis.begin(), axis.end(), v);
  if (it == axis.end() || it == axis.begin() || it + 1 == axis.end()) return cell_slope_stencil(axis, v);
  const auto k = static_cast<std::size_t>(it - axis.begin());
  const double h = axis[k + 1] - axis[k - 1];
  Stencil s;
  s.index = {k - 1, k + 1, 0};
  s.weight = {-1.0 / h, 1.0 / h, 0.0};
  s.size = 2;
  return s;
}

double GridModel::combine_y(const Stencil& sx, const Stencil& sw, const Stencil& sy) const {
  double acc = 0.0;
  for (int i = 0; i < sx.size; ++i)
    for (int j = 0; j < sw.size; ++j)
      for (int k = 0; k < sy.size; ++k)
        acc += sx.weight[i] * sw.weight[j] * sy.weight[k] * fy(sx.index[i], sw.index[j], sy.index[k]);
  return acc;
}

double GridModel::combine_w(const Stencil& sx, const Stencil& sw) const {
  double acc = 0.0;
  for (int i = 0; i < sx.size; ++i)
    for (int j = 0; j < sw.size; ++j) acc += sx.weight[i] * sw.weight[j] * fw(sx.index[i], sw.index[j]);
  return acc;
}

void GridModel::require_x(double x) const {
  if (!(x >= d_.xs.front() && x <= d_.xs.back())) {
    std::ostringstream msg;
    msg << "x=" << x << " outside tabulated range [" << d_.xs.front() << ", " << d_.xs.back() << "]";
    throw DomainError(msg.str());
  }
}

double GridModel::cdf_y(double y, double x, double w) const {
  require_x(x);
  return std::clamp(combine_y(value_stencil(d_.xs, x), value_stencil(d_.ws, w), value_stencil(d_.ys, y)), 0.0, 1.0);
}

double GridModel::pdf_y(double y, double x, double w) const {
  require_x(x);
  if (y < d_.ys.front() || y > d_.ys.back()) return 0.0;
  return std::max(0.0, combine_y(value_stencil(d_.xs, x), value_stencil(d_.ws, w), cell_slope_stencil(d_.ys, y)));
}

double GridModel::pdf_w(double w, double x) const {
  require_x(x);
  if (w < d_.ws.front() || w > d_.ws.back()) return 0.0;
  return std::max(0.0, combine_w(value_stencil(d_.xs, x), cell_slope_stencil(d_.ws, w)));
}

double GridModel::cdf_w(double w, double x) const {
  require_x(x);
  return std::clamp(combine_w(value_stencil(d_.xs, x), value_stencil(d_.ws, w)), 0.0, 1.0);
}

Interval GridModel::support_x() const { return {d_.xs.front(), d_.xs.back()}; }

Interval GridModel::support_y(double, double) const { return {d_.ys.front(), d_.ys.back()}; }

Interval GridModel::support_w(double) const { return {d_.ws.front(), d_.ws.back()}; }

Interval GridModel::support_y_marginal(double) const { return {d_.ys.front(), d_.ys.back()}; }

std::vector<double> GridModel::w_breakpoints(double, double) const { return d_.ws; }

bool GridModel::one_sided_x(double x) const { return x == d_.xs.front() || x == d_.xs.back(); }

std::optional<double> GridModel::cdf_y_dx(double y, double x, double w) const {
  require_x(x);
  return combine_y(slope_stencil(d_.xs, x), value_stencil(d_.ws, w), value_stencil(d_.ys, y));
}

std::optional<double> GridModel::cdf_y_dw(double y, double x, double w) const {
  require_x(x);
  if (w < d_.ws.front() || w > d_.ws.back()) return 0.0;
  return combine_y(value_stencil(d_.xs, x), cell_slope_stencil(d_.ws, w), value_stencil(d_.ys, y));
}

std::optional<double> GridModel::pdf_y_dx(double y, double x, double w) const {
  require_x(x);
  if (y < d_.ys.front() || y > d_.ys.back()) return 0.0;
  return combine_y(slope_stencil(d_.xs, x), value_stencil(d_.ws, w), cell_slope_stencil(d_.ys, y));
}

std::optional<double> GridModel::pdf_w_dx(double w, double x) const {
  require_x(x);
  if (w < d_.ws.front() || w > d_.ws.back()) return 0.0;
  return combine_w(slope_stencil(d_.xs, x), cell_slope_stencil(d_.ws, w));
}

std::optional<double> GridModel::cdf_w_dx(double w, double x) const {
  require_x(x);
  return combine_w(slope_stencil(d_.xs, x), value_stencil(d_.ws, w));
}

}  // namespace collapse
