#include <gtest/gtest.h>

#include <cmath>

#include "lungcover/error.hpp"
#include "lungcover/rng.hpp"
#include "lungcover/stats.hpp"
#include "stats_oracle.hpp"

using namespace lungcover;
using namespace lungcover::stats;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected lungcover::Error";
  return ErrorCode::InvalidArgument;
}

void expect_rel(double actual, double expected, double tol, const std::string& what) {
  EXPECT_LE(std::abs(actual - expected), tol * std::max(1.0, std::abs(expected))) << what;
}

}  // namespace

TEST(StatsOracle, PairedTMatchesScipy) {
  for (const auto& c : oracle::kPaired) {
    const auto r = paired_t_test(c.xs, c.ys);
    expect_rel(r.statistic, c.t, 1e-10, c.name);
    EXPECT_NEAR(r.p_value, c.t_p, 1e-10) << c.name;
    EXPECT_EQ(r.n, c.xs.size());
  }
}

TEST(StatsOracle, WilcoxonMatchesScipy) {
  for (const auto& c : oracle::kPaired) {
    const auto r = wilcoxon_signed_rank(c.xs, c.ys);
    EXPECT_DOUBLE_EQ(r.statistic, c.w_stat) << c.name;
    EXPECT_NEAR(r.p_value, c.w_p, 1e-10) << c.name;
  }
}

TEST(StatsOracle, ShapiroWilkMatchesScipy) {
  for (const auto& c : oracle::kNormality) {
    const auto r = shapiro_wilk(c.xs);
    EXPECT_NEAR(r.statistic, c.w, 1e-8) << c.name;
    EXPECT_NEAR(r.p_value, c.p, 1e-8) << c.name;
  }
}

TEST(StatsOracle, SpecialFunctions) {
  for (const auto& [p, z] : oracle::kNormalQuantile) expect_rel(special::normal_quantile(p), z, 1e-13, std::to_string(p));
  for (const auto& row : oracle::kStudentT) {
    expect_rel(special::student_t_two_sided(row[0], row[1]), row[2], 1e-11, std::to_string(row[0]));
  }
  EXPECT_EQ(special::student_t_two_sided(0.0, 7.0), 1.0);
  EXPECT_NEAR(special::normal_cdf(1.959963984540054), 0.975, 1e-15);
  EXPECT_NEAR(special::normal_sf(8.0), 6.220960574271785e-16, 1e-28);
}

TEST(StatsExamples, OneSampleThroughPairedT) {
  const std::vector<double> xs{1, 2, 3, 4, 10}, zeros(5, 0.0);
  const auto r = paired_t_test(xs, zeros);
  EXPECT_NEAR(r.statistic, oracle::kOneSampleT, 1e-12);
  EXPECT_NEAR(r.p_value, oracle::kOneSampleP, 1e-12);
}

TEST(StatsExamples, AllPositiveSignedRank) {
  std::vector<double> xs(10), zeros(10, 0.0);
  for (int i = 0; i < 10; ++i) xs[i] = i + 1;
  const auto r = wilcoxon_signed_rank(xs, zeros);
  EXPECT_EQ(r.statistic, oracle::kAllPositiveW);
  EXPECT_NEAR(r.p_value, oracle::kAllPositiveP, 1e-12);
}

TEST(StatsExamples, ZeroMeanDifferenceGivesPOne) {
  const std::vector<double> xs{1, 2, 3, 4}, ys{2, 1, 4, 3};
  const auto r = paired_t_test(xs, ys);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(StatsExamples, DescribeAndQuartiles) {
  const std::vector<double> xs{1, 2, 3, 4};
  const auto d = describe(xs);
  EXPECT_EQ(d.n, 4u);
  EXPECT_DOUBLE_EQ(d.mean, 2.5);
  ASSERT_TRUE(d.sd);
  EXPECT_NEAR(*d.sd, std::sqrt(5.0 / 3.0), 1e-15);
  const auto q = describe_quartiles(xs);
  EXPECT_DOUBLE_EQ(q.q1, 1.75);
  EXPECT_DOUBLE_EQ(q.median, 2.5);
  EXPECT_DOUBLE_EQ(q.q3, 3.25);
  EXPECT_FALSE(describe(std::vector<double>{7.0}).sd);
}

TEST(StatsErrors, Codes) {
  const std::vector<double> a{1, 2, 3}, b{1, 2};
  EXPECT_EQ(code_of([&] { paired_t_test(a, b); }), ErrorCode::LengthMismatch);
  EXPECT_EQ(code_of([&] { paired_t_test(std::vector<double>{1}, std::vector<double>{0}); }), ErrorCode::TooFewSamples);
  EXPECT_EQ(code_of([&] { paired_t_test(a, std::vector<double>{0, 1, 2}); }), ErrorCode::DegenerateVariance);
  EXPECT_EQ(code_of([&] { wilcoxon_signed_rank(a, a); }), ErrorCode::AllZeroDifferences);
  EXPECT_EQ(code_of([&] { wilcoxon_signed_rank(a, std::vector<double>{0, 0, 0}); }), ErrorCode::TooFewSamples);
  EXPECT_EQ(code_of([&] { shapiro_wilk(b); }), ErrorCode::TooFewSamples);
  EXPECT_EQ(code_of([&] { shapiro_wilk(std::vector<double>(5001, 1.0)); }), ErrorCode::TooManySamples);
  EXPECT_EQ(code_of([&] { shapiro_wilk(std::vector<double>{2, 2, 2}); }), ErrorCode::DegenerateVariance);
  EXPECT_EQ(code_of([&] { describe(std::vector<double>{}); }), ErrorCode::EmptyInput);
}

TEST(StatsProperties, InvariantsOnRandomData) {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 5 + rng.below(60);
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = rng.normal() * 3.0 + 10.0;
      ys[i] = xs[i] + rng.normal();
    }
    const auto d = describe(xs);
    ASSERT_LE(d.min, d.mean);
    ASSERT_LE(d.mean, d.max);
    ASSERT_GE(*d.sd, 0.0);
    const auto q = describe_quartiles(xs);
    ASSERT_LE(q.min, q.q1);
    ASSERT_LE(q.q1, q.median);
    ASSERT_LE(q.median, q.q3);
    ASSERT_LE(q.q3, q.max);
    for (const auto& r : {paired_t_test(xs, ys), wilcoxon_signed_rank(xs, ys), shapiro_wilk(xs)}) {
      ASSERT_GE(r.p_value, 0.0);
      ASSERT_LE(r.p_value, 1.0);
    }
    // Swapping the samples flips t and leaves p unchanged.
    const auto t1 = paired_t_test(xs, ys), t2 = paired_t_test(ys, xs);
    ASSERT_DOUBLE_EQ(t1.statistic, -t2.statistic);
    ASSERT_DOUBLE_EQ(t1.p_value, t2.p_value);
    const auto sw = shapiro_wilk(xs);
    ASSERT_GT(sw.statistic, 0.0);
    ASSERT_LE(sw.statistic, 1.0);
  }
}

TEST(StatsProperties, ShapiroWilkAcceptsNormalSamples) {
  Rng rng(31337);
  int accepted = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> xs(50);
    for (auto& x : xs) x = rng.normal();
    if (shapiro_wilk(xs).p_value > 0.05) ++accepted;
  }
  EXPECT_GE(accepted, 90);
}

TEST(DecisionRule, PicksTestFromNormality) {
  for (const auto& c : oracle::kPaired) {
    if (c.xs.size() < 5) continue;
    const auto cmp = compare_paired(c.xs, c.ys);
    ASSERT_TRUE(cmp.normality);
    const auto expected = cmp.normality->p_value < kAlpha ? TestName::wilcoxon_signed_rank : TestName::paired_t;
    EXPECT_EQ(cmp.test.test_name, expected) << c.name;
    EXPECT_FALSE(cmp.decision_rule_note.empty());
  }
}

TEST(DecisionRule, FallsBackToTWhenNormalityNotComputable) {
  // n = 2 is below the Shapiro-Wilk minimum.
  const std::vector<double> xs{3, 5}, ys{1, 2};
  const auto cmp = compare_paired(xs, ys);
  EXPECT_FALSE(cmp.normality);
  EXPECT_EQ(cmp.test.test_name, TestName::paired_t);
  EXPECT_NE(cmp.decision_rule_note.find("not computable"), std::string::npos);
}
