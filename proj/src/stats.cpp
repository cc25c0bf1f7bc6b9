#include "hcnet/stats.hpp"

#include <algorithm>
#include <cmath>

#include "hcnet/error.hpp"

namespace hcnet {

namespace {

std::vector<double> sorted_copy(std::span<const double> x) {
    if (x.empty()) throw Error(ErrorCode::NumericFailure, "empty sample");
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    return v;
}

// Walks the distinct sample values, calling visit(F_n(v-), F_n(v), v).
template <class Visit>
void for_each_jump(const std::vector<double>& v, Visit visit) {
    const double n = static_cast<double>(v.size());
    std::size_t i = 0;
    while (i < v.size()) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        visit(static_cast<double>(i) / n, static_cast<double>(j) / n, v[i]);
        i = j;
    }
}

}  // namespace

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
    const auto v = sorted_copy(samples);
    double d = 0.0;
    for_each_jump(v, [&](double before, double after, double x) {
        const double fx = cdf(x);
        const double fminus = x <= 0.0 ? 0.0 : fx;
        d = std::max({d, std::fabs(after - fx), std::fabs(before - fminus)});
    });
    return d;
}

double ks_one_sided_above(std::span<const double> samples, const std::function<double(double)>& cdf) {
    const auto v = sorted_copy(samples);
    double d = 0.0;
    for_each_jump(v, [&](double, double after, double x) { d = std::max(d, after - cdf(x)); });
    return d;
}

namespace {

double two_sample(std::span<const double> a, std::span<const double> b, bool signed_b_minus_a) {
    const auto x = sorted_copy(a), y = sorted_copy(b);
    const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() || j < y.size()) {
        double t;
        if (j == y.size() || (i < x.size() && x[i] <= y[j]))
            t = x[i];
        else
            t = y[j];
        while (i < x.size() && x[i] == t) ++i;
        while (j < y.size() && y[j] == t) ++j;
        const double diff = static_cast<double>(j) / nb - static_cast<double>(i) / na;
        d = std::max(d, signed_b_minus_a ? diff : std::fabs(diff));
    }
    return d;
}

}  // namespace

double ks_two_sample(std::span<const double> a, std::span<const double> b) { return two_sample(a, b, false); }

double ks_two_sample_dominance(std::span<const double> a, std::span<const double> b) { return two_sample(a, b, true); }

Summary summarize(std::span<const double> samples) {
    if (samples.empty()) throw Error(ErrorCode::NumericFailure, "empty sample");
    Summary s;
    double mean = 0.0, m2 = 0.0;
    long n = 0;
    for (double x : samples) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }
    s.mean = mean;
    s.variance = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    s.standard_error = std::sqrt(s.variance / static_cast<double>(n));
    return s;
}

Interval wilson_interval(long k, long n, double z) {
    if (n <= 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
    const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw Error(ErrorCode::NumericFailure, "empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Histogram freedman_diaconis_histogram(std::span<const double> samples) {
    const auto v = sorted_copy(samples);
    Histogram h;
    h.total = static_cast<long>(v.size());
    h.lower = v.front();
    const double range = v.back() - v.front();
    const double iqr = quantile_sorted(v, 0.75) - quantile_sorted(v, 0.25);
    double width = 2.0 * iqr / std::cbrt(static_cast<double>(v.size()));
    if (!(width > 0.0)) width = range > 0.0 ? range : 1.0;
    std::size_t bins = range > 0.0 ? static_cast<std::size_t>(std::ceil(range / width)) : 1;
    bins = std::clamp<std::size_t>(bins, 1, 100000);
    h.width = range > 0.0 ? range / static_cast<double>(bins) : width;
    h.counts.assign(bins, 0);
    for (double x : v) {
        auto b = static_cast<std::size_t>((x - h.lower) / h.width);
        if (b >= bins) b = bins - 1;
        ++h.counts[b];
    }
    return h;
}

}  // namespace hcnet
