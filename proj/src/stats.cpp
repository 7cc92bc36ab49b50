#include "lungcover/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "lungcover/error.hpp"

namespace lungcover::stats {

std::string_view to_string(TestName name) noexcept {
  switch (name) {
    case TestName::paired_t: return "paired_t";
    case TestName::wilcoxon_signed_rank: return "wilcoxon_signed_rank";
    case TestName::shapiro_wilk: return "shapiro_wilk";
  }
  return "paired_t";
}

namespace special {

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorCode::InvalidArgument, "incomplete_beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;

  // Continued fraction (modified Lentz); converges fast for
  // x < (a+1)/(a+b+2), otherwise use the reflection I_x(a,b) = 1 - I_{1-x}(b,a).
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - incomplete_beta(b, a, 1.0 - x);

  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double f = d;
  for (int m = 1; m <= 10000; ++m) {
    const double dm = m;
    double num = dm * (b - dm) * x / ((a + 2.0 * dm - 1.0) * (a + 2.0 * dm));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    f *= d * c;
    num = -(a + dm) * (a + b + dm) * x / ((a + 2.0 * dm) * (a + 2.0 * dm + 1.0));
    d = 1.0 + num * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    f *= delta;
    if (std::abs(delta - 1.0) < eps) break;
  }
  return std::exp(log_front) * f / a;
}

double student_t_two_sided(double t, double df) {
  if (t == 0.0) return 1.0;
  if (!std::isfinite(t)) return 0.0;
  const double x = df / (df + t * t);
  return std::clamp(incomplete_beta(df / 2.0, 0.5, x), 0.0, 1.0);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::InvalidArgument, "normal_quantile needs p in [0, 1]");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((r * 5226.495278852545925 + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((r * 7.7454501427834140764e-4 + .0227238449892691845833) * r + .24178072517745061177) * r +
                 1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
              4.6303378461565452959) * r + 1.42343711074968357734) /
            (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r + .0151986665636164571966) * r +
                 .14810397642748007459) * r + .68976733498510000455) * r + 1.6763848301838038494) * r +
              2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r + .0012426609473880784386) * r +
                 .026532189526576123093) * r + .29656057182850489123) * r + 1.7848265399172913358) * r +
              5.4637849111641143699) * r + 6.6579046435011037772) /
            (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                 7.868691311456132591e-4) * r + .0148753612908506148525) * r + .13692988092273580531) * r +
              .59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

}  // namespace special

namespace {

std::vector<double> differences(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::LengthMismatch, "paired samples differ in length: " + std::to_string(xs.size()) +
                                               " vs " + std::to_string(ys.size()));
  }
  std::vector<double> d(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) d[i] = xs[i] - ys[i];
  return d;
}

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Two-pass sum of squared deviations.
double sum_sq_dev(std::span<const double> xs, double mean) {
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss;
}

double poly(std::span<const double> coef, double x) {
  // coef[0] + coef[1] x + ... (AS R94's POLY)
  double result = 0.0;
  for (auto it = coef.rbegin(); it != coef.rend(); ++it) result = result * x + *it;
  return result;
}

}  // namespace

DescriptiveSummary describe(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorCode::EmptyInput, "describe needs at least one value");
  DescriptiveSummary s;
  s.n = xs.size();
  s.mean = mean_of(xs);
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  s.min = *lo;
  s.max = *hi;
  // Guard the invariant min <= mean <= max against summation rounding.
  s.mean = std::clamp(s.mean, s.min, s.max);
  if (s.n >= 2) s.sd = std::sqrt(sum_sq_dev(xs, s.mean) / static_cast<double>(s.n - 1));
  return s;
}

double quantile_linear(std::span<const double> sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

QuartileSummary describe_quartiles(std::span<const double> xs) {
  if (xs.empty()) throw Error(ErrorCode::EmptyInput, "describe_quartiles needs at least one value");
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  return {quantile_linear(sorted, 0.5), quantile_linear(sorted, 0.25), quantile_linear(sorted, 0.75),
          sorted.front(), sorted.back()};
}

TestResult paired_t_test(std::span<const double> xs, std::span<const double> ys) {
  const auto d = differences(xs, ys);
  const auto n = d.size();
  if (n < 2) throw Error(ErrorCode::TooFewSamples, "paired t-test needs n >= 2");
  const double mean = mean_of(d);
  const double ss = sum_sq_dev(d, mean);
  if (std::all_of(d.begin(), d.end(), [&](double v) { return v == d.front(); }) || !(ss > 0.0)) {
    throw Error(ErrorCode::DegenerateVariance, "paired differences have zero variance");
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
  return {t, special::student_t_two_sided(t, static_cast<double>(n - 1)), TestName::paired_t, n};
}

TestResult wilcoxon_signed_rank(std::span<const double> xs, std::span<const double> ys) {
  auto d = differences(xs, ys);
  const bool had_values = !d.empty();
  std::erase_if(d, [](double v) { return v == 0.0; });
  if (had_values && d.empty()) throw Error(ErrorCode::AllZeroDifferences, "every paired difference is zero");
  const auto n = d.size();
  if (n < 5) {
    throw Error(ErrorCode::TooFewSamples, "signed-rank test needs >= 5 nonzero differences, got " + std::to_string(n));
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return std::abs(d[a]) < std::abs(d[b]); });

  double w_plus = 0.0, w_minus = 0.0, tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && std::abs(d[order[j]]) == std::abs(d[order[i]])) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) (d[order[k]] > 0.0 ? w_plus : w_minus) += avg_rank;
    i = j;
  }

  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  const double se = std::sqrt((nn * (nn + 1.0) * (2.0 * nn + 1.0) - tie_term / 2.0) / 24.0);
  double z = (w_plus - mean) / se;
  if (z > 0.0) {
    z -= 0.5 / se;
  } else if (z < 0.0) {
    z += 0.5 / se;
  }
  const double p = std::min(1.0, 2.0 * special::normal_sf(std::abs(z)));
  return {std::min(w_plus, w_minus), p, TestName::wilcoxon_signed_rank, n};
}

TestResult shapiro_wilk(std::span<const double> xs) {
  const auto n = xs.size();
  if (n < 3) throw Error(ErrorCode::TooFewSamples, "Shapiro-Wilk needs n >= 3");
  if (n > 5000) throw Error(ErrorCode::TooManySamples, "Shapiro-Wilk supports n <= 5000");

  std::vector<double> x(xs.begin(), xs.end());
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (!(range > 1e-19 * std::max(1.0, std::abs(x.back())))) {
    throw Error(ErrorCode::DegenerateVariance, "Shapiro-Wilk needs non-identical values");
  }

  // Coefficients for the lower half of the order statistics (AS R94).
  static constexpr double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
  static constexpr double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
  static constexpr double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
  static constexpr double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static constexpr double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static constexpr double c6[] = {-0.4803, -0.082676, 0.0030302};
  static constexpr double g[] = {-2.273, 0.459};

  const double an = static_cast<double>(n);
  const std::size_t half = n / 2;
  std::vector<double> a(half);
  if (n == 3) {
    a[0] = std::sqrt(0.5);
  } else {
    const double an25 = an + 0.25;
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      a[i] = special::normal_quantile((static_cast<double>(i + 1) - 0.375) / an25);
      summ2 += a[i] * a[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(c1, rsn) - a[0] / ssumm2;
    std::size_t first_scaled;
    double fac;
    if (n > 5) {
      first_scaled = 2;
      const double a2 = -a[1] / ssumm2 + poly(c2, rsn);
      fac = std::sqrt((summ2 - 2.0 * a[0] * a[0] - 2.0 * a[1] * a[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[1] = a2;
    } else {
      first_scaled = 1;
      fac = std::sqrt((summ2 - 2.0 * a[0] * a[0]) / (1.0 - 2.0 * a1 * a1));
    }
    a[0] = a1;
    for (std::size_t i = first_scaled; i < half; ++i) a[i] = -a[i] / fac;
  }

  // W as the squared correlation between the sorted data and the
  // antisymmetric coefficient vector; 1 - W is formed directly to keep
  // precision when W is close to 1.
  std::vector<double> coef(n, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    coef[i] = -a[i];
    coef[n - 1 - i] = a[i];
  }
  const double coef_mean = mean_of(coef);
  double x_mean = 0.0;
  for (double v : x) x_mean += v / range;
  x_mean /= an;
  double ssa = 0.0, ssx = 0.0, sax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double asa = coef[i] - coef_mean;
    const double xsx = x[i] / range - x_mean;
    ssa += asa * asa;
    ssx += xsx * xsx;
    sax += asa * xsx;
  }
  const double ssassx = std::sqrt(ssa * ssx);
  const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
  const double w = 1.0 - w1;

  double p;
  if (n == 3) {
    constexpr double pi6 = 6.0 / 3.14159265358979323846;
    constexpr double stqr = 3.14159265358979323846 / 3.0;
    p = std::clamp(pi6 * (std::asin(std::sqrt(w)) - stqr), 0.0, 1.0);
    return {w, p, TestName::shapiro_wilk, n};
  }
  double y = std::log(w1);
  const double lxx = std::log(an);
  double m, s;
  if (n <= 11) {
    const double gamma = poly(g, an);
    if (y >= gamma) return {w, 1e-99, TestName::shapiro_wilk, n};
    y = -std::log(gamma - y);
    m = poly(c3, an);
    s = std::exp(poly(c4, an));
  } else {
    m = poly(c5, lxx);
    s = std::exp(poly(c6, lxx));
  }
  p = std::clamp(special::normal_sf((y - m) / s), 0.0, 1.0);
  return {w, p, TestName::shapiro_wilk, n};
}

PairedComparison compare_paired(std::span<const double> xs, std::span<const double> ys) {
  const auto d = differences(xs, ys);
  PairedComparison out;
  try {
    out.normality = shapiro_wilk(d);
  } catch (const Error& e) {
    out.normality.reset();
    out.test = paired_t_test(xs, ys);
    out.decision_rule_note = "Shapiro-Wilk on differences not computable (" + std::string(lungcover::to_string(e.code())) +
                             "); paired t-test used";
    return out;
  }
  if (out.normality->p_value < kAlpha) {
    out.test = wilcoxon_signed_rank(xs, ys);
    out.decision_rule_note = "Shapiro-Wilk on differences p < 0.05: Wilcoxon signed-rank used";
  } else {
    out.test = paired_t_test(xs, ys);
    out.decision_rule_note = "Shapiro-Wilk on differences p >= 0.05: paired t-test used";
  }
  return out;
}

}  // namespace lungcover::stats
