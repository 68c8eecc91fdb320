#include <gtest/gtest.h>

#include <random>

#include "collapse/cochran.hpp"
#include "collapse/error.hpp"

using namespace collapse;

TEST(Cochran, IdentityCovarianceGivesZeroSlopes) {
  const Cov3 id{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  const auto d = cochran_decompose(id);
  EXPECT_EQ(d.beta_yx, 0.0);
  EXPECT_EQ(d.beta_yx_w, 0.0);
  EXPECT_EQ(d.beta_yw_x, 0.0);
  EXPECT_EQ(d.beta_wx, 0.0);
  EXPECT_EQ(d.residual, 0.0);
}

// Slopes by explicit normal equations on a hand-sized covariance.
TEST(Cochran, SlopesMatchNormalEquations) {
  const Cov3 c{{{2.0, 0.8, 0.6}, {0.8, 1.0, 0.3}, {0.6, 0.3, 1.5}}};
  const auto d = cochran_decompose(c);
  const double det = 1.0 * 1.5 - 0.3 * 0.3;
  EXPECT_NEAR(d.beta_yx, 0.8, 1e-15);
  EXPECT_NEAR(d.beta_wx, 0.3, 1e-15);
  EXPECT_NEAR(d.beta_yx_w, (0.8 * 1.5 - 0.6 * 0.3) / det, 1e-15);
  EXPECT_NEAR(d.beta_yw_x, (0.6 * 1.0 - 0.8 * 0.3) / det, 1e-15);
  EXPECT_LT(std::abs(d.residual), 1e-15);
}

TEST(Cochran, RejectsInvalidMatrices) {
  EXPECT_THROW(cochran_decompose(Cov3{{{1, 0.2, 0}, {0.3, 1, 0}, {0, 0, 1}}}), InputError);
  EXPECT_THROW(cochran_decompose(Cov3{{{1, 0, 0}, {0, 0, 0}, {0, 0, 1}}}), InputError);
  EXPECT_THROW(cochran_decompose(Cov3{{{1, 0.5, 0.5}, {0.5, 1, 1}, {0.5, 1, 1}}}), InputError);
}

TEST(Cochran, SampleCovarianceAndConstantColumn) {
  std::vector<Sample3> rows{{1, 2, 3}, {2, 2, 5}, {4, 2, 1}};
  EXPECT_THROW(cochran_decompose(sample_covariance(rows)), InputError);
  EXPECT_THROW(sample_covariance(std::vector<Sample3>{{1, 2, 3}, {2, 3, 4}}), InputError);
  rows = {{1, 1, 0}, {2, 3, 1}, {3, 2, 5}, {5, 4, 2}};
  const auto c = sample_covariance(rows);
  EXPECT_NEAR(c[1][1], (1 + 9 + 4 + 16 - 4 * 2.5 * 2.5) / 3.0, 1e-14);
  EXPECT_NEAR(c[0][2], (0 + 2 + 15 + 10 - 4 * 2.75 * 2.0) / 3.0, 1e-14);
}

TEST(Cochran, GaussianSampleResidual) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  std::vector<Sample3> rows;
  for (int k = 0; k < 10000; ++k) {
    const double x = n(rng), w = 0.6 * x + n(rng);
    rows.push_back({1.5 * x - 0.7 * w + n(rng), x, w});
  }
  const auto d = cochran_decompose(sample_covariance(rows));
  EXPECT_LT(std::abs(d.residual), 1e-10);
  EXPECT_NEAR(d.beta_yx_w, 1.5, 0.05);
  EXPECT_NEAR(d.beta_yw_x, -0.7, 0.05);
}
