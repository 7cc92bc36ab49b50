"""Reference values for the statistics tests, computed with SciPy.

Run once: python3 gen_stats_oracle.py > ../stats_oracle.hpp
SciPy is an independent implementation (Cephes incomplete beta, swilk.f
port, its own rank/tie machinery), so the C++ code is checked against it
rather than against itself.
"""
import numpy as np
from scipy import stats

paired = {
    "small_integers": ([5, 7, 9, 11, 20], [4, 5, 6, 7, 10]),
    "volumes_ml": ([2662.0, 2275.7, 2511.3, 2840.9, 1466.2, 4017.9, 3120.4, 2733.3],
                   [2058.3, 1540.3, 1985.0, 2230.1, 1205.0, 3186.2, 2490.7, 2101.9]),
    "fractions_twelve": ([22.8, 32.9, 27.3, 19.4, 25.1, 30.2, 21.7, 28.8, 24.4, 26.0, 31.5, 23.3],
                         [22.7, 33.4, 27.1, 19.4, 25.9, 29.6, 21.0, 28.8, 25.2, 26.6, 30.9, 23.9]),
    "ties_and_zeros": ([1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11],
                       [0, 0, 5, 2, 3, 4, 7, 10, 7, 6, 11]),
    "negative_shift": ([0.12, 0.45, -0.33, 0.91, 0.05, -0.27, 0.66, 0.38, -0.14, 0.21],
                       [0.52, 0.61, 0.02, 1.40, 0.31, 0.10, 0.79, 0.95, 0.20, 0.33]),
    "mixed_signs": ([3.1, 4.7, 2.2, 5.9, 4.4, 3.8, 6.1, 2.9, 5.0, 4.1, 3.3, 4.9, 5.5, 2.4, 3.9],
                    [3.4, 4.1, 2.9, 5.2, 4.6, 3.1, 6.8, 2.2, 5.3, 3.5, 3.9, 4.2, 5.1, 3.0, 3.2]),
}

normal_sets = {
    "n3": [1.0, 2.0, 4.0],
    "n5_linear": [1.0, 2.0, 3.0, 4.0, 5.0],
    "n8_skewed": [0.1, 0.2, 0.2, 0.3, 0.5, 0.9, 1.7, 3.2],
    "n11_small_sample": [2.3, 1.9, 2.8, 3.1, 2.0, 2.6, 2.2, 3.5, 2.4, 2.9, 2.1],
    "n20_fractions": [22.8, 32.9, 27.3, 19.4, 25.1, 30.2, 21.7, 28.8, 24.4, 26.0,
                      31.5, 23.3, 18.9, 55.9, 11.1, 32.6, 29.1, 24.8, 27.7, 20.5],
    "n50_outlier": list(stats.norm.ppf((np.arange(1, 50) - 0.375) / (49 + 0.25))) + [1000.0],
    "n60_uniformish": [((i * 37) % 60) / 59.0 for i in range(60)],
    "n150_lognormal": list(np.exp(stats.norm.ppf((np.arange(1, 151) - 0.5) / 150) * 0.6)),
}

def fmt(x):
    return repr(float(x))


def arr(xs):
    return "{" + ", ".join(fmt(v) for v in xs) + "}"


out = []
out.append("#pragma once")
out.append("// Generated by tests/oracle/gen_stats_oracle.py (SciPy %s). Do not edit." % __import__("scipy").__version__)
out.append("#include <utility>")
out.append("#include <vector>")
out.append("namespace oracle {")
out.append("struct Paired { const char* name; std::vector<double> xs, ys; double t, t_p, w_stat, w_p; };")
out.append("struct Normality { const char* name; std::vector<double> xs; double w, p; };")
out.append("inline const std::vector<Paired> kPaired = {")
for name, (xs, ys) in paired.items():
    t = stats.ttest_rel(xs, ys)
    w = stats.wilcoxon(xs, ys, zero_method="wilcox", correction=True, method="asymptotic")
    out.append('    {"%s", %s, %s, %s, %s, %s, %s},' % (name, arr(xs), arr(ys), fmt(t.statistic), fmt(t.pvalue),
                                                      fmt(w.statistic), fmt(w.pvalue)))
out.append("};")
out.append("inline const std::vector<Normality> kNormality = {")
for name, xs in normal_sets.items():
    r = stats.shapiro(xs)
    out.append('    {"%s", %s, %s, %s},' % (name, arr(xs), fmt(r.statistic), fmt(r.pvalue)))
out.append("};")
t = stats.ttest_1samp([1, 2, 3, 4, 10], 0.0)
out.append("// One-sample t on {1, 2, 3, 4, 10} (paired against zeros).")
out.append("inline constexpr double kOneSampleT = %s, kOneSampleP = %s;" % (fmt(t.statistic), fmt(t.pvalue)))
w = stats.wilcoxon(np.arange(1, 11), zero_method="wilcox", correction=True, method="asymptotic")
out.append("// Signed-rank on 1..10 against zeros.")
out.append("inline constexpr double kAllPositiveW = %s, kAllPositiveP = %s;" % (fmt(w.statistic), fmt(w.pvalue)))
probs = [1e-300, 1e-20, 1e-10, 1e-5, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.975, 0.999, 1 - 1e-9]
out.append("inline const std::vector<std::pair<double, double>> kNormalQuantile = {")
for q in probs:
    out.append("    {%s, %s}," % (fmt(q), fmt(stats.norm.ppf(q))))
out.append("};")
tp = [(0.5, 3.0), (1.0, 1.0), (2.2, 10.0), (-4.0, 54.0), (12.0, 7.0), (0.01, 200.0)]
out.append("// (t, df, two-sided p)")
out.append("inline const std::vector<std::vector<double>> kStudentT = {")
for t_, df in tp:
    out.append("    {%s, %s, %s}," % (fmt(t_), fmt(df), fmt(2 * stats.t.sf(abs(t_), df))))
out.append("};")
out.append("}  // namespace oracle")
print("\n".join(out))
