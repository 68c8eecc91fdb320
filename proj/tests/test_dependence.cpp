#include <gtest/gtest.h>

#include <cmath>

#include "collapse/dependence.hpp"
#include "collapse/error.hpp"
#include "collapse/families.hpp"

using namespace collapse;

namespace {

DiscreteJoint example_table() {
  return DiscreteJoint::from_counts({"1", "2"}, {"1", "2"}, {"1", "2"},
                                    {25, 35, 75, 60, 35, 15, 45, 40});
}

// P(Y = 1 | x, w) straight from the counts n[y][x][w].
Rational p1(const std::vector<int>& n, int x, std::optional<int> w) {
  auto at = [&](int y, int xx, int ww) { return n[(y * 2 + xx) * 2 + ww]; };
  int num = 0, den = 0;
  for (int ww = 0; ww < 2; ++ww) {
    if (w && *w != ww) continue;
    num += at(0, x, ww);
    den += at(0, x, ww) + at(1, x, ww);
  }
  Rational q(num, den);
  q.canonicalize();
  return q;
}

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2 * M_PI); }

}  // namespace

TEST(DiscreteDependence, ExactAgainstHandCounts) {
  const std::vector<int> n{25, 35, 75, 60, 35, 15, 45, 40};
  const auto j = example_table();
  for (int w = 0; w < 2; ++w)
    EXPECT_EQ(dist_dep_discrete(j, 0, 0, WCondition::level(w)), p1(n, 1, w) - p1(n, 0, w));
  EXPECT_EQ(dist_dep_discrete(j, 0, 0, WCondition::marginal()), p1(n, 1, std::nullopt) - p1(n, 0, std::nullopt));
  EXPECT_EQ(dist_dep_discrete(j, 0, 0, WCondition::level(0)), Rational(5, 24));
  EXPECT_EQ(dist_dep_discrete(j, 0, 0, WCondition::level(1)), Rational(-1, 10));
  EXPECT_EQ(dist_dep_discrete(j, 0, 0, WCondition::marginal()), Rational(3, 44));
  // The top Y level has CDF 1 everywhere.
  EXPECT_EQ(dist_dep_discrete(j, 1, 0, WCondition::marginal()), 0);
}

TEST(DiscreteDependence, EmptyCellIsReportedNotFatal) {
  const auto j = DiscreteJoint::from_counts({"1", "2"}, {"1", "2"}, {"1", "2"}, {3, 0, 4, 5, 2, 0, 1, 1});
  EXPECT_THROW(dist_dep_discrete(j, 0, 0, WCondition::level(1)), DomainError);
  const auto d = discrete_dependence(j);
  EXPECT_FALSE(d.cond(0, 0, 1).has_value());
  EXPECT_TRUE(d.cond(0, 0, 0).has_value());
  EXPECT_FALSE(d.notes.empty());
}

// F(y|x) = Phi((y - mu(x)) / s(x)); dF/dx = -phi(z) (mu' s + (y - mu) s') / s^2.
TEST(ContinuousDependence, GaussianMarginalDerivativeClosedForm) {
  const double a1 = 0.7, a2 = -0.4, a3 = 0.9, sigma = 1.3, wm = 0.2, ws = 0.8, wsd = 1.1;
  const auto m = make_model("linear-interaction", {{"alpha1", a1},
                                                   {"alpha2", a2},
                                                   {"alpha3", a3},
                                                   {"sigma", sigma},
                                                   {"w_mean", wm},
                                                   {"w_slope", ws},
                                                   {"w_sd", wsd}});
  for (double x : {-0.5, 0.1, 0.8}) {
    const double b = a2 + a3 * x;
    const double mu = a1 * x + b * (wm + ws * x);
    const double dmu = a1 + a3 * (wm + ws * x) + b * ws;
    const double s = std::sqrt(sigma * sigma + b * b * wsd * wsd);
    const double ds = b * a3 * wsd * wsd / s;
    for (double y : {-1.0, 0.2, 1.4}) {
      const double z = (y - mu) / s;
      const double expect = -phi(z) * (dmu * s + (y - mu) * ds) / (s * s);
      const auto v = dist_dep(*m, y, x, std::nullopt);
      EXPECT_NEAR(v.value, expect, 1e-9) << x << ' ' << y;
      EXPECT_EQ(v.method, DepMethod::finite_difference);
    }
  }
}

TEST(ContinuousDependence, ConditionalIsAnalyticWhenAvailable) {
  const auto m = make_model("linear-interaction");
  const auto v = dist_dep(*m, 0.3, 0.2, 0.5);
  EXPECT_EQ(v.method, DepMethod::analytic);
  const WithoutDerivatives fd(*m);
  const auto n = dist_dep(fd, 0.3, 0.2, 0.5);
  EXPECT_EQ(n.method, DepMethod::finite_difference);
  EXPECT_NEAR(n.value, v.value, 1e-8);
}

TEST(ContinuousDependence, DensityJumpIsNonDifferentiable) {
  const auto m = make_model("uniform-shift");
  // |y - w| = x: the conditional density switches off as x decreases.
  EXPECT_THROW(density_dep(*m, 1.0, 0.5, 0.5), DomainError);
  EXPECT_NO_THROW(density_dep(*m, 0.6, 0.5, 0.5));
  EXPECT_NEAR(density_dep(*m, 0.6, 0.5, 0.5).value, -2.0, 1e-6);  // d/dx 1/(2x) at x = 0.5
}

TEST(ContinuousDependence, FieldMarksUndefinedPoints) {
  const auto m = make_model("uniform-shift");
  const EvalGrid g{{0.6, 1.0}, {0.5, 0.7}, {0.5}};
  const auto f = dependence_field(*m, g, DepKind::density, DepScope::conditional);
  EXPECT_EQ(f.undefined_count(), 1u);
  EXPECT_TRUE(std::isnan(f.at(1, 0, 0)));
  EXPECT_EQ(f.methods[f.index(1, 0, 0)], DepMethod::undefined);
  EXPECT_FALSE(f.notes.empty());
}

TEST(Decomposition, TermsAddUpToMarginalDerivative) {
  for (const char* fam : {"linear-interaction", "uniform-quadratic", "uniform-shift"}) {
    const auto m = make_model(fam);
    const auto xr = m->preferred_x_range();
    const double x = 0.5 * (xr.lo + xr.hi);
    const double y = 0.5 * (m->support_y_marginal(x).lo + m->support_y_marginal(x).hi);
    const double yy = std::isfinite(y) ? y : 0.3;
    const auto d = decomposition_terms(*m, yy, x);
    EXPECT_NEAR(d.term_avg + d.term_residual, dist_dep(*m, yy, x, std::nullopt).value, 1e-8) << fam;
  }
}
