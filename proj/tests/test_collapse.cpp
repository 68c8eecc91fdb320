#include <gtest/gtest.h>

#include "collapse/collapse.hpp"
#include "collapse/error.hpp"
#include "collapse/families.hpp"
#include "collapse/generators.hpp"

using namespace collapse;

namespace {

DiscreteJoint example_table() {
  return DiscreteJoint::from_counts({"1", "2"}, {"1", "2"}, {"1", "2"}, {25, 35, 75, 60, 35, 15, 45, 40});
}

std::string cell(const Witness& w, const std::string& key) {
  for (const auto& [k, v] : w.cells)
    if (k == key) return v;
  return {};
}

void expect_witness_invariant(const Verdict& v) {
  if (!v.applicable) return;
  EXPECT_EQ(v.witness.has_value(), !v.holds) << v.property;
  if (v.exact) {
    ASSERT_TRUE(v.exact_violation.has_value()) << v.property;
    EXPECT_EQ(v.holds, *v.exact_violation == 0) << v.property;
  } else {
    EXPECT_EQ(v.holds, v.max_violation <= v.tolerance) << v.property;
  }
}

}  // namespace

TEST(DiscreteChecks, ExampleTableVerdicts) {
  const auto j = example_table();
  const auto h = check_homogeneity(j);
  EXPECT_FALSE(h.holds);
  EXPECT_EQ(*h.exact_violation, Rational(5, 24) + Rational(1, 10));
  ASSERT_TRUE(h.witness);
  EXPECT_EQ(cell(*h.witness, "y"), "1");
  EXPECT_FALSE(check_collapsibility(j).holds);
  const auto a = check_A_collapsibility(j);
  EXPECT_TRUE(a.holds);
  EXPECT_EQ(*a.exact_violation, 0);
  EXPECT_FALSE(a.witness);
  const auto xw = check_independence(j, Independence::x_w);
  EXPECT_TRUE(xw.holds);
  EXPECT_EQ(*xw.exact_violation, 0);
  EXPECT_FALSE(check_independence(j, Independence::y_w_given_x).holds);
  EXPECT_EQ(sufficiency_necessity(j).status, "consistent");
}

TEST(DiscreteChecks, SingleWLevelIsAnInputError) {
  const auto j = DiscreteJoint::from_counts({"1", "2"}, {"1", "2"}, {"1"}, {1, 2, 3, 4});
  EXPECT_THROW(check_homogeneity(j), InputError);
  EXPECT_THROW(check_uniform_collapsibility(j), InputError);
}

// Binary W with discrete X: A-collapsible although neither Y _||_ W | X nor X _||_ W.
TEST(DiscreteChecks, NecessityCounterexampleForDiscreteX) {
  const auto j = DiscreteJoint::from_counts({"1", "2"}, {"1", "2"}, {"1", "2"}, {1, 3, 2, 4, 3, 1, 2, 4});
  const auto r = sufficiency_necessity(j);
  EXPECT_TRUE(r.a_collapsible.holds);
  EXPECT_FALSE(r.c1.holds);
  EXPECT_FALSE(r.c2.holds);
  ASSERT_TRUE(r.necessity_consistent.has_value());
  EXPECT_FALSE(*r.necessity_consistent);
  EXPECT_EQ(r.status, "necessity fails: A-collapsible with neither condition (discrete X)");
}

TEST(DiscreteChecks, ProductTableIsUniformlyCollapsible) {
  // counts = a(y, x) b(w): W independent of (Y, X).
  const int a[2][3] = {{2, 5, 1}, {3, 1, 4}};
  const int b[3] = {1, 4, 2};
  std::vector<Rational> counts;
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 3; ++x)
      for (int w = 0; w < 3; ++w) counts.emplace_back(a[y][x] * b[w]);
  const auto j = DiscreteJoint::from_counts({"1", "2"}, {"1", "2", "3"}, {"1", "2", "3"}, counts);
  EXPECT_TRUE(check_uniform_collapsibility(j).holds);
  EXPECT_TRUE(check_collapsibility(j).holds);
  EXPECT_TRUE(check_homogeneity(j).holds);
  EXPECT_TRUE(lattice_violations(class_membership(j)).empty());
}

TEST(DiscreteChecks, ZeroMassIntervalIsSkippedWithNote) {
  auto j = DiscreteJoint::from_counts({"1", "2"}, {"1", "2"}, {"1", "2", "3"},
                                      {1, 0, 2, 3, 4, 1, 2, 0, 1, 1, 1, 2});
  const auto v = check_uniform_collapsibility(j);
  bool noted = false;
  for (const auto& n : v.notes) noted |= n.find("zero-mass") != std::string::npos;
  EXPECT_TRUE(noted);
}

TEST(DiscreteChecks, ReversalTableIsFlaggedWithRecomputableWitness) {
  const std::vector<int> n{9, 30, 80, 2, 1, 70, 20, 8};  // [y][x][w]
  const auto j = DiscreteJoint::from_counts({"1", "2"}, {"1", "2"}, {"1", "2"},
                                            std::vector<Rational>(n.begin(), n.end()));
  const auto v = detect_reversal(j);
  ASSERT_TRUE(v.applicable);
  ASSERT_FALSE(v.holds);
  ASSERT_TRUE(v.witness);
  EXPECT_EQ(cell(*v.witness, "y"), "1");
  EXPECT_EQ(cell(*v.witness, "conditional_w").empty(), false);
  // Both strata: P(Y=1) falls from x=1 to x=2; overall it rises.
  EXPECT_LT(Rational(80, 100) - Rational(9, 10), 0);
  EXPECT_LT(Rational(2, 10) - Rational(30, 100), 0);
  EXPECT_GT(Rational(82, 110) - Rational(39, 110), 0);
  EXPECT_NEAR(v.max_violation, 43.0 / 110.0, 1e-15);
}

TEST(DiscreteChecks, MixedConditionalSignsAreNotApplicable) {
  EXPECT_FALSE(detect_reversal(example_table()).applicable);
}

TEST(DiscreteProperties, StrataSatisfyTheirDefiningConditions) {
  Rng rng(11);
  for (int k = 0; k < 60; ++k) {
    const auto shape = random_shape(rng, k % 2 == 0);
    EXPECT_TRUE(check_independence(random_table(rng, Stratum::c1, shape), Independence::y_w_given_x).holds);
    EXPECT_TRUE(check_independence(random_table(rng, Stratum::c2, shape), Independence::x_w).holds);
    EXPECT_TRUE(check_homogeneity(random_table(rng, Stratum::homogeneous, shape)).holds);
    const auto both = random_table(rng, Stratum::c2_homogeneous, shape);
    EXPECT_TRUE(check_homogeneity(both).holds);
    EXPECT_TRUE(check_independence(both, Independence::x_w).holds);
  }
}

TEST(DiscreteProperties, LatticeChainAndWitnessInvariant) {
  Rng rng(5);
  const Stratum strata[] = {Stratum::free, Stratum::c1, Stratum::c2, Stratum::homogeneous, Stratum::c2_homogeneous};
  for (int k = 0; k < 150; ++k) {
    const auto j = random_table(rng, strata[k % 5], random_shape(rng, k % 3 == 0));
    const auto m = class_membership(j);
    EXPECT_TRUE(lattice_violations(m).empty());
    if (m.in_C1 || m.in_C2) EXPECT_TRUE(m.in_C_A);
    const auto u = check_uniform_collapsibility(j);
    if (u.holds) EXPECT_TRUE(m.in_C_W);
    if (m.in_C_W) EXPECT_TRUE(m.in_C_H);
    for (const auto& v : {check_homogeneity(j), check_collapsibility(j), u, check_A_collapsibility(j),
                          check_independence(j, Independence::x_w), check_independence(j, Independence::y_w_given_x),
                          detect_reversal(j)})
      expect_witness_invariant(v);
  }
}

TEST(DiscreteProperties, GeneratorFindsReversal) {
  const auto j = find_reversal_table(1);
  ASSERT_TRUE(j);
  for (std::size_t y = 0; y < 2; ++y)
    for (std::size_t x = 0; x < 2; ++x)
      for (std::size_t w = 0; w < 2; ++w) {
        EXPECT_GE(j->count(y, x, w), 1);
        EXPECT_LE(j->count(y, x, w), 100);
      }
  EXPECT_FALSE(detect_reversal(*j).holds);
}

namespace {

CheckContext context(const ContinuousModel& m, std::size_t n = 6) {
  CheckContext c;
  c.grid = auto_grid(m, n, n, 3);
  c.tolerance = default_tolerance(m);
  return c;
}

}  // namespace

TEST(ContinuousChecks, SufficientConditionsGiveACollapsibility) {
  const auto ci = make_model("ci-yw", {{"beta", 0.8}, {"w_slope", 1.2}});
  const auto ctx = context(*ci);
  EXPECT_TRUE(check_independence(*ci, Independence::y_w_given_x, ctx).holds);
  EXPECT_FALSE(check_independence(*ci, Independence::x_w, ctx).holds);
  EXPECT_TRUE(check_A_collapsibility(*ci, ctx).verdict.holds);

  const auto ind = make_model("indep-xw", {{"alpha3", 0.6}});
  const auto c2 = context(*ind);
  EXPECT_TRUE(check_independence(*ind, Independence::x_w, c2).holds);
  EXPECT_TRUE(check_A_collapsibility(*ind, c2).verdict.holds);
  EXPECT_TRUE(check_residual(*ind, c2).holds);
}

TEST(ContinuousChecks, InteractionBreaksHomogeneity) {
  const auto m = make_model("linear-interaction", {{"alpha3", 0.5}, {"w_slope", 1.0}, {"w_mean", 0.0}, {"w_sd", 1.0}});
  const auto ctx = context(*m);
  const auto f = dependence_field(*m, ctx.grid, DepKind::distribution, DepScope::conditional);
  const auto h = check_homogeneity(f, ctx.tolerance);
  EXPECT_FALSE(h.holds);
  expect_witness_invariant(h);
}

TEST(ContinuousChecks, ResidualEqualsAViolation) {
  Rng rng(21);
  for (int k = 0; k < 8; ++k) {
    const auto m = random_linear_interaction(rng);
    const auto a = check_A_collapsibility(*m, context(*m, 4));
    EXPECT_NEAR(a.max_residual, a.verdict.max_violation, 1e-8);
    expect_witness_invariant(a.verdict);
  }
}

TEST(ContinuousChecks, UniformQuadraticIsACollapsibleWithoutConditions) {
  const auto m = make_model("uniform-quadratic");
  CheckContext ctx;
  ctx.grid = {linspace(0.01, 0.05, 10), linspace(0.25, 1.0, 10), {-0.5, 0.5, 1.5}};
  ctx.tolerance = 1e-6;
  EXPECT_LE(check_residual(*m, ctx).max_violation, 1e-6);
  const auto sn = sufficiency_necessity(*m, ctx);
  EXPECT_FALSE(sn.c1.holds);
  EXPECT_FALSE(sn.c2.holds);
  EXPECT_TRUE(sn.a_collapsible.holds);
  EXPECT_FALSE(sn.binary_w);
}

TEST(ContinuousChecks, CollapsibleImpliesHomogeneousOnSufficientFamilies) {
  const auto m = make_model("indep-xw", {{"alpha2", 0.0}, {"alpha3", 0.0}});
  const auto ctx = context(*m);
  const auto cm = class_membership(*m, ctx);
  EXPECT_TRUE(cm.in_C_W);
  EXPECT_TRUE(cm.in_C_H);
  EXPECT_TRUE(cm.in_C_A);
  EXPECT_TRUE(lattice_violations(cm).empty());
}
