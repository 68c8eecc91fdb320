#pragma once

#include <array>
#include <span>

namespace collapse {

// Covariance of (Y, X, W), row-major.
using Cov3 = std::array<std::array<double, 3>, 3>;

struct CochranDecomposition {
  double beta_yx = 0.0;    // Y on X
  double beta_yx_w = 0.0;  // Y on X, adjusting for W
  double beta_yw_x = 0.0;  // Y on W, adjusting for X
  double beta_wx = 0.0;    // W on X
  double residual = 0.0;   // beta_yx - (beta_yx_w + beta_yw_x beta_wx)
};

// Throws InputError for an asymmetric or indefinite matrix, non-positive
// regressor variances or "collinear regressors".
CochranDecomposition cochran_decompose(const Cov3& cov);

struct Sample3 {
  double y, x, w;
};

// Sample covariance (divisor n - 1); needs at least 3 rows.
Cov3 sample_covariance(std::span<const Sample3> rows);

}  // namespace collapse
