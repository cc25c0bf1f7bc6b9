#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hcnet {

/// sup |F_n - F| for nonnegative samples against a CDF that is continuous
/// on (0, inf) and may carry an atom at 0 (F(0) = atom, F(0-) = 0).
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);

/// sup (F_n - F): positive when the samples sit stochastically below F.
double ks_one_sided_above(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Two-sample KS distance.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// sup_x (F_b(x) - F_a(x)); small when b stochastically dominates a.
double ks_two_sample_dominance(std::span<const double> a, std::span<const double> b);

struct Summary {
    double mean = 0.0;
    double standard_error = 0.0;
    double variance = 0.0;
};
Summary summarize(std::span<const double> samples);

struct Interval {
    double lower = 0.0;
    double upper = 1.0;
};
/// Wilson score interval for k successes in n trials.
Interval wilson_interval(long k, long n, double z = 1.959963984540054);

struct Histogram {
    double lower = 0.0;
    double width = 1.0;
    std::vector<long> counts;
    long total = 0;
    double density(std::size_t bin) const { return counts[bin] / (static_cast<double>(total) * width); }
};
/// Freedman-Diaconis bins over [min, max].
Histogram freedman_diaconis_histogram(std::span<const double> samples);

/// Linear-interpolated empirical quantile, q in [0,1], on sorted data.
double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace hcnet
