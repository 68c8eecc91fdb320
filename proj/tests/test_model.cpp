#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "collapse/error.hpp"
#include "collapse/families.hpp"
#include "collapse/model.hpp"
#include "collapse/dependence.hpp"

using namespace collapse;

namespace {

std::vector<TableRow> rows_of(std::initializer_list<std::tuple<const char*, const char*, const char*, int>> list) {
  std::vector<TableRow> rows;
  for (auto [y, x, w, c] : list) rows.push_back({y, x, w, Rational(c)});
  return rows;
}

double normal_cdf_ref(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

TEST(DiscreteJoint, DuplicatesAreSummed) {
  const auto rows = rows_of({{"1", "1", "1", 2}, {"1", "1", "1", 3}, {"2", "2", "1", 5}});
  const auto j = DiscreteJoint::build(rows);
  EXPECT_EQ(j.count(0, 0, 0), 5);
  EXPECT_EQ(j.total(), 10);
  EXPECT_EQ(j.count(0, 1, 0), 0);
}

TEST(DiscreteJoint, NumericOrderPutsTenAfterNine) {
  const auto rows = rows_of({{"a", "10", "w", 1}, {"a", "9", "w", 1}, {"b", "x", "w", 1}});
  const auto j = DiscreteJoint::build(rows);
  EXPECT_EQ(j.levels_x(), (std::vector<std::string>{"9", "10", "x"}));
}

TEST(DiscreteJoint, AppearanceOrder) {
  const auto rows = rows_of({{"a", "10", "w", 1}, {"a", "9", "w", 1}});
  LevelOrdering o;
  o.order = LevelOrder::first_appearance;
  EXPECT_EQ(DiscreteJoint::build(rows, o).levels_x(), (std::vector<std::string>{"10", "9"}));
}

TEST(DiscreteJoint, ExplicitOrderMustCoverLevels) {
  const auto rows = rows_of({{"a", "1", "w", 1}, {"a", "2", "w", 1}});
  LevelOrdering o;
  o.x = {"2", "1"};
  EXPECT_EQ(DiscreteJoint::build(rows, o).levels_x(), (std::vector<std::string>{"2", "1"}));
  o.x = {"2"};
  EXPECT_THROW(DiscreteJoint::build(rows, o), InputError);
}

TEST(DiscreteJoint, RejectsBadTables) {
  EXPECT_THROW(DiscreteJoint::build(rows_of({{"1", "1", "1", -1}, {"1", "2", "1", 2}})), InputError);
  EXPECT_THROW(DiscreteJoint::build(rows_of({{"1", "1", "1", 0}, {"1", "2", "1", 0}})), InputError);
  EXPECT_THROW(DiscreteJoint::build(rows_of({{"1", "1", "1", 4}})), InputError);
}

TEST(DiscreteJoint, NullConditioningIsDomainError) {
  const auto j = DiscreteJoint::build(rows_of({{"1", "1", "1", 3}, {"1", "2", "1", 2}, {"1", "2", "2", 2}}));
  EXPECT_THROW(j.cdf(0, 0, WCondition::level(1)), DomainError);
  EXPECT_EQ(j.cdf(0, 0, WCondition::marginal()), 1);
}

TEST(Families, UnknownNamesAndBadParameters) {
  EXPECT_THROW(make_model("no-such-family"), InputError);
  EXPECT_THROW(make_model("uniform-shift", {{"alpha1", 1.0}}), InputError);
  EXPECT_THROW(make_model("ci-yw", {{"alpha3", 1.0}}), InputError);
  EXPECT_THROW(make_model("indep-xw", {{"w_slope", 1.0}}), InputError);
  EXPECT_THROW(make_model("uniform-quadratic", {{"w_sd", 0.0}}), InputError);
  EXPECT_THROW(make_model("linear-interaction", {{"truncation_sd", 2.0}}), InputError);
}

TEST(Families, GridOutsideXSupportIsRejected) {
  const auto m = make_model("uniform-shift");
  EvalGrid g{{0.0}, {-1.0, 1.0}, {0.0}};
  EXPECT_THROW(g.validate(*m), InputError);
  EXPECT_THROW((EvalGrid{{0.0}, {1.0, 1.0}, {0.0}}.validate()), InputError);
}

// Monte Carlo: W ~ N(0, x^2), Y|w ~ U(w - x, w + x). By symmetry P(Y <= 0) = 1/2.
TEST(Families, UniformShiftMarginalAgreesWithSimulation) {
  const auto m = make_model("uniform-shift");
  std::mt19937_64 rng(7);
  std::normal_distribution<double> w(0.0, 1.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 400000;
  int below = 0;
  for (int k = 0; k < n; ++k) below += (w(rng) + u(rng) <= 0.0);
  const double mc = static_cast<double>(below) / n;
  EXPECT_NEAR(marginal_cdf_y(*m, 0.0, 1.0), 0.5, 1e-12);
  EXPECT_NEAR(marginal_cdf_y(*m, 0.0, 1.0), mc, 4.0 * 0.5 / std::sqrt(n));
  // A point off the symmetry axis, again against simulation.
  int below_half = 0;
  for (int k = 0; k < n; ++k) below_half += (w(rng) + u(rng) <= 0.5);
  EXPECT_NEAR(marginal_cdf_y(*m, 0.5, 1.0), static_cast<double>(below_half) / n, 4.0 * 0.5 / std::sqrt(n));
}

// Y|x ~ N(a1 x + (a2 + a3 x) m(x), sigma^2 + (a2 + a3 x)^2 sd^2) with m(x) = w_mean + w_slope x.
TEST(Families, GaussianMarginalHasClosedForm) {
  const double a1 = 0.7, a2 = -0.4, a3 = 0.9, sigma = 1.3, wm = 0.2, ws = 0.8, wsd = 1.1;
  const auto m = make_model("linear-interaction", {{"alpha1", a1},
                                                   {"alpha2", a2},
                                                   {"alpha3", a3},
                                                   {"sigma", sigma},
                                                   {"w_mean", wm},
                                                   {"w_slope", ws},
                                                   {"w_sd", wsd}});
  for (double x : {-0.8, 0.0, 0.6}) {
    const double b = a2 + a3 * x;
    const double mu = a1 * x + b * (wm + ws * x);
    const double sd = std::sqrt(sigma * sigma + b * b * wsd * wsd);
    for (double y : {-2.0, -0.3, 0.4, 1.9}) {
      EXPECT_NEAR(marginal_cdf_y(*m, y, x), normal_cdf_ref((y - mu) / sd), 1e-12);
      EXPECT_NEAR(marginal_pdf_y(*m, y, x), std::exp(-0.5 * std::pow((y - mu) / sd, 2)) / (sd * std::sqrt(2 * M_PI)),
                  1e-12);
    }
  }
}

TEST(Families, AnalyticDerivativesMatchFiniteDifferences) {
  struct Point {
    const char* family;
    double y, x, w;
  };
  const Point points[] = {{"uniform-quadratic", 0.2, 0.6, 0.4},
                          {"uniform-shift", 0.1, 1.2, 0.3},
                          {"linear-interaction", 0.3, 0.4, -0.2},
                          {"ci-yw", -0.5, 0.7, 0.9},
                          {"indep-xw", 1.1, -0.3, 0.5}};
  const NumericOptions opts;
  for (const auto& p : points) {
    const auto m = make_model(p.family);
    const WithoutDerivatives fd(*m);
    EXPECT_NEAR(*m->cdf_y_dx(p.y, p.x, p.w), cdf_y_dx(fd, p.y, p.x, p.w, opts), 1e-7) << p.family;
    EXPECT_NEAR(*m->cdf_y_dw(p.y, p.x, p.w), cdf_y_dw(fd, p.y, p.x, p.w, opts), 1e-7) << p.family;
    EXPECT_NEAR(*m->pdf_w_dx(p.w, p.x), pdf_w_dx(fd, p.w, p.x, opts), 1e-7) << p.family;
    EXPECT_NEAR(*m->cdf_w_dx(p.w, p.x), cdf_w_dx(fd, p.w, p.x, opts), 1e-7) << p.family;
  }
}

TEST(Families, PosteriorDensityIntegratesToOne) {
  const auto m = make_model("linear-interaction");
  num::QuadratureSpec q{1e-12, 1e-11, 2000, num::Interval{-12.0, 12.0}};
  const auto r = num::integrate([&](double w) { return posterior_w_density(*m, w, 0.4, 0.3); }, {-12.0, 12.0}, q);
  EXPECT_NEAR(r.value, 1.0, 1e-10);
}

TEST(GridModel, TabulationReproducesNodes) {
  const auto m = make_model("ci-yw", {{"beta", 0.5}});
  const auto g = GridModel::tabulate(*m, linspace(-1.0, 1.0, 21), linspace(-6.0, 6.0, 61), linspace(-8.0, 8.0, 161));
  EXPECT_NEAR(g.cdf_y(0.3, 0.2, 0.4), m->cdf_y(0.3, 0.2, 0.4), 5e-3);
  EXPECT_NEAR(g.cdf_w(0.4, 0.2), m->cdf_w(0.4, 0.2), 5e-3);
  EXPECT_THROW(g.cdf_y(0.0, 1.5, 0.0), DomainError);
  EXPECT_TRUE(g.one_sided_x(-1.0));
  EXPECT_FALSE(g.one_sided_x(0.05));
}

TEST(AutoGrid, StaysInsideSupports) {
  for (const auto& name : builtin_families()) {
    if (name == "grid") continue;
    const auto m = make_model(name);
    const auto g = auto_grid(*m, 5, 5, 3);
    EXPECT_NO_THROW(g.validate(*m)) << name;
  }
}
