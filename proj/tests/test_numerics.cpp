#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "collapse/dependence.hpp"
#include "collapse/error.hpp"
#include "collapse/families.hpp"
#include "collapse/numerics.hpp"
#include "collapse/parallel.hpp"

using namespace collapse;
using namespace collapse::num;

namespace {
const QuadratureSpec tight{1e-13, 1e-12, 4000, std::nullopt};
}

TEST(Quadrature, ExponentialOnUnitInterval) {
  const auto r = integrate([](double t) { return std::exp(t); }, {0.0, 1.0}, tight);
  EXPECT_NEAR(r.value, std::numbers::e - 1.0, 1e-13);
  EXPECT_LE(r.error, 1e-12);
}

TEST(Quadrature, KinkAtBreakpoint) {
  const std::vector<double> kink{0.0};
  const auto r = integrate([](double t) { return std::abs(t); }, {-1.0, 2.0}, tight, kink);
  EXPECT_NEAR(r.value, 2.5, 1e-14);
}

TEST(Quadrature, JumpIsResolvedByBreakpoint) {
  const std::vector<double> jump{0.3};
  const auto r = integrate([](double t) { return t < 0.3 ? 1.0 : 0.0; }, {0.0, 1.0}, tight, jump);
  EXPECT_NEAR(r.value, 0.3, 1e-14);
}

TEST(Quadrature, GaussianMassUnderTruncation) {
  QuadratureSpec s = tight;
  s.truncation = Interval{-10.0, 10.0};
  const auto r = integrate(normal_pdf, {-INFINITY, INFINITY}, s);
  EXPECT_NEAR(r.value, 1.0, 1e-13);
}

TEST(Quadrature, UnboundedWithoutTruncationIsInputError) {
  EXPECT_THROW(integrate(normal_pdf, {0.0, INFINITY}, tight), InputError);
}

TEST(Quadrature, NonFiniteIntegrandIsNumericalError) {
  EXPECT_THROW(integrate([](double) { return NAN; }, {0.0, 1.0}, tight),
               NumericalError);
}

TEST(Quadrature, VectorComponentsMatchScalarRuns) {
  auto r = integrate_n<2>([](double t) { return std::array<double, 2>{t * t, std::cos(t)}; }, {0.0, 2.0}, tight);
  EXPECT_NEAR(r.value[0], 8.0 / 3.0, 1e-13);
  EXPECT_NEAR(r.value[1], std::sin(2.0), 1e-13);
}

TEST(CentralDiff, SecondOrderConvergenceRatio) {
  auto f = [](double t) { return std::sin(t); };
  DiffSpec a{DiffScheme::central2, 1e-2, std::nullopt};
  DiffSpec b{DiffScheme::central2, 5e-3, std::nullopt};
  const double e1 = std::abs(central_diff(f, 1.0, a).value - std::cos(1.0));
  const double e2 = std::abs(central_diff(f, 1.0, b).value - std::cos(1.0));
  const double ratio = e1 / e2;
  EXPECT_GE(ratio, 3.0);
  EXPECT_LE(ratio, 5.0);
}

TEST(CentralDiff, FourthOrderBeatsSecondOrder) {
  auto f = [](double t) { return std::exp(t); };
  DiffSpec c2{DiffScheme::central2, 1e-2, std::nullopt};
  DiffSpec c4{DiffScheme::central4, 1e-2, std::nullopt};
  const double e2 = std::abs(central_diff(f, 0.5, c2).value - std::exp(0.5));
  const double e4 = std::abs(central_diff(f, 0.5, c4).value - std::exp(0.5));
  EXPECT_LT(e4, e2 * 1e-2);
}

TEST(CentralDiff, OneSidedAtSupportEdge) {
  auto f = [](double t) { return std::exp(t); };
  DiffSpec s{DiffScheme::central4, 1e-3, Interval{0.0, 1.0}};
  const auto d = central_diff(f, 1.0, s);
  EXPECT_EQ(d.kind, DiffKind::backward);
  EXPECT_NEAR(d.value, std::numbers::e, 1e-5);
  const auto lo = central_diff(f, 0.0, s);
  EXPECT_EQ(lo.kind, DiffKind::forward);
  EXPECT_NEAR(lo.value, 1.0, 1e-5);
}

TEST(NormalCdf, AgreesWithErfc) {
  for (double z : {-6.0, -2.5, -1.0, 0.0, 0.3, 1.7, 4.0}) {
    EXPECT_NEAR(normal_cdf(z), 0.5 * std::erfc(-z / std::numbers::sqrt2), 1e-15);
    EXPECT_NEAR(normal_pdf(z), std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi), 1e-16);
  }
}

TEST(InvertCdf, RoundTripsTheNormal) {
  for (double eta = 0.01; eta < 1.0; eta += 0.049) {
    const double z = invert_cdf(normal_cdf, eta, {-10.0, 10.0}, 1e-14, 1e-14);
    EXPECT_NEAR(normal_cdf(z), eta, 1e-13) << eta;
  }
}

TEST(InvertCdf, FlatSegmentStillHitsLevel) {
  auto F = [](double t) { return std::clamp(t < 1.0 ? t / 2.0 : (t < 2.0 ? 0.5 : (t - 1.0) / 2.0), 0.0, 1.0); };
  const double r = invert_cdf(F, 0.25, {0.0, 3.0});
  EXPECT_NEAR(r, 0.5, 1e-9);
  EXPECT_NEAR(F(invert_cdf(F, 0.5, {0.0, 3.0})), 0.5, 1e-10);
}

TEST(Parallel, MatchesSerialBitwise) {
  const auto m = make_model("linear-interaction", {{"alpha3", 0.7}});
  const auto grid = auto_grid(*m, 6, 5, 3);
  for (auto scope : {DepScope::conditional, DepScope::marginal}) {
    const auto s = dependence_field(*m, grid, DepKind::distribution, scope, {}, Execution::serial);
    const auto p = dependence_field(*m, grid, DepKind::distribution, scope, {}, Execution::parallel);
    ASSERT_EQ(s.values.size(), p.values.size());
    for (std::size_t k = 0; k < s.values.size(); ++k) EXPECT_EQ(s.values[k], p.values[k]);
  }
}

TEST(Parallel, LowestFailingIndexIsRethrown) {
  auto f = [](std::size_t k) -> int {
    if (k == 7 || k == 3 || k == 40) throw std::runtime_error(std::to_string(k));
    return static_cast<int>(k);
  };
  for (auto exec : {Execution::serial, Execution::parallel}) {
    try {
      evaluate_indexed<int>(64, f, exec);
      FAIL();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "3");
    }
  }
}
