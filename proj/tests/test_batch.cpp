#include <gtest/gtest.h>

#include "collapse/batch.hpp"
#include "collapse/error.hpp"

using namespace collapse;

TEST(Batch, DeterministicPerSeedAndExecution) {
  BatchOptions a;
  a.seed = 17;
  a.count = 60;
  a.exec = Execution::serial;
  BatchOptions b = a;
  b.exec = Execution::parallel;
  for (Suite s : {Suite::necessity, Suite::lattice, Suite::chain}) {
    const auto r1 = run_batch(s, a), r2 = run_batch(s, b);
    EXPECT_EQ(r1.passed, r2.passed);
    EXPECT_EQ(r1.vacuous, r2.vacuous);
    EXPECT_EQ(r1.coverage, r2.coverage);
    EXPECT_EQ(r1.first_counterexample, r2.first_counterexample);
  }
}

TEST(Batch, SuitesPassWithCoverage) {
  BatchOptions o;
  o.count = 100;
  for (Suite s : {Suite::sufficiency, Suite::necessity, Suite::lattice, Suite::chain}) {
    const auto r = run_batch(s, o);
    EXPECT_EQ(r.failed, 0u) << to_string(s) << ": " << r.first_counterexample.value_or("");
    EXPECT_EQ(r.passed, o.count);
    EXPECT_TRUE(r.notes.empty()) << to_string(s);
    EXPECT_LT(r.vacuous, r.count) << to_string(s);
  }
}

TEST(Batch, CoxSuiteSmall) {
  BatchOptions o;
  o.count = 25;
  const auto r = run_batch(Suite::cox, o);
  EXPECT_EQ(r.failed, 0u) << r.first_counterexample.value_or("");
}

TEST(Batch, RejectsBadArguments) {
  EXPECT_THROW(parse_suite("everything"), InputError);
  BatchOptions o;
  o.count = 0;
  EXPECT_THROW(run_batch(Suite::chain, o), InputError);
}
