#include "collapse/cochran.hpp"

#include <cmath>

#include "collapse/error.hpp"

namespace collapse {

namespace {
constexpr int Y = 0, X = 1, W = 2;
}

CochranDecomposition cochran_decompose(const Cov3& c) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (!std::isfinite(c[i][j])) throw InputError("covariance matrix has a non-finite entry");
      const double scale = std::max({1.0, std::abs(c[i][j]), std::abs(c[j][i])});
      if (std::abs(c[i][j] - c[j][i]) > 1e-12 * scale) throw InputError("covariance matrix is not symmetric");
    }
  if (!(c[X][X] > 0.0)) throw InputError("Var(X) must be positive");
  if (!(c[W][W] > 0.0)) throw InputError("Var(W) must be positive");
  if (c[Y][Y] < 0.0) throw InputError("Var(Y) must be nonnegative");

  const double gram_det = c[X][X] * c[W][W] - c[X][W] * c[X][W];
  if (!(gram_det > 1e-12 * c[X][X] * c[W][W])) throw InputError("collinear regressors");

  const double det = c[Y][Y] * gram_det - c[Y][X] * (c[X][Y] * c[W][W] - c[X][W] * c[W][Y]) +
                     c[Y][W] * (c[X][Y] * c[W][X] - c[X][X] * c[W][Y]);
  const double scale = c[Y][Y] * c[X][X] * c[W][W];
  if (det < -1e-10 * std::max(scale, 1e-300)) throw InputError("covariance matrix is not positive semidefinite");

  CochranDecomposition d;
  d.beta_yx = c[Y][X] / c[X][X];
  d.beta_wx = c[W][X] / c[X][X];
  d.beta_yx_w = (c[W][W] * c[X][Y] - c[X][W] * c[W][Y]) / gram_det;
  d.beta_yw_x = (c[X][X] * c[W][Y] - c[X][W] * c[X][Y]) / gram_det;
  d.residual = d.beta_yx - (d.beta_yx_w + d.beta_yw_x * d.beta_wx);
  return d;
}

Cov3 sample_covariance(std::span<const Sample3> rows) {
  if (rows.size() < 3) throw InputError("need at least 3 sample rows, got " + std::to_string(rows.size()));
  std::array<double, 3> mean{};
  for (const auto& r : rows) {
    if (!std::isfinite(r.y) || !std::isfinite(r.x) || !std::isfinite(r.w)) throw InputError("non-finite sample value");
    mean[0] += r.y;
    mean[1] += r.x;
    mean[2] += r.w;
  }
  for (auto& m : mean) m /= static_cast<double>(rows.size());
  Cov3 c{};
  for (const auto& r : rows) {
    const std::array<double, 3> d{r.y - mean[0], r.x - mean[1], r.w - mean[2]};
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) c[i][j] += d[i] * d[j];
  }
  const double n1 = static_cast<double>(rows.size() - 1);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) c[j][i] = c[i][j] = c[i][j] / n1;
  return c;
}

}  // namespace collapse
