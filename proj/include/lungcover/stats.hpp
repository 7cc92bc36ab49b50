#pragma once

// Descriptive summaries and the paired-comparison tests used for cohort
// reports.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace lungcover::stats {

struct DescriptiveSummary {
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> sd;  // sample SD (n-1); absent when n == 1
  double min = 0.0;
  double max = 0.0;
};

struct QuartileSummary {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

enum class TestName { paired_t, wilcoxon_signed_rank, shapiro_wilk };
std::string_view to_string(TestName name) noexcept;

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  TestName test_name = TestName::paired_t;
  std::size_t n = 0;
};

DescriptiveSummary describe(std::span<const double> xs);

/// Linear interpolation between order statistics at zero-based position
/// p*(n-1).
QuartileSummary describe_quartiles(std::span<const double> xs);
double quantile_linear(std::span<const double> sorted, double p);

/// Two-sided dependent-samples t-test on d = xs - ys, df = n - 1.
TestResult paired_t_test(std::span<const double> xs, std::span<const double> ys);

/// Two-sided signed-rank test. Zero differences are dropped; tied |d| get
/// average ranks. statistic = min(W+, W-); p from the normal approximation
/// with tie-corrected variance and a 0.5 continuity correction.
TestResult wilcoxon_signed_rank(std::span<const double> xs, std::span<const double> ys);

/// Shapiro-Wilk W and p-value, Royston's AS R94 approximation.
/// Valid for 3 <= n <= 5000.
TestResult shapiro_wilk(std::span<const double> xs);

/// Result of the cohort decision rule: Shapiro-Wilk on the paired
/// differences picks Wilcoxon when p < alpha, otherwise the paired t-test.
struct PairedComparison {
  std::optional<TestResult> normality;
  TestResult test;
  std::string decision_rule_note;
};

inline constexpr double kAlpha = 0.05;

PairedComparison compare_paired(std::span<const double> xs, std::span<const double> ys);

namespace special {

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
/// Two-sided p-value of Student's t with `df` degrees of freedom; exactly 1
/// at t == 0.
double student_t_two_sided(double t, double df);
double normal_cdf(double z);
/// Upper tail 1 - Phi(z), accurate for large z.
double normal_sf(double z);
/// Inverse of normal_cdf (Wichura's AS 241, ~1e-16 relative).
double normal_quantile(double p);

}  // namespace special
}  // namespace lungcover::stats
