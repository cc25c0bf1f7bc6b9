#include "hcnet/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hcnet/error.hpp"

namespace hcnet {

int zero_diagonal_sturm_count(std::span<const double> offsq, double x) {
    const double pivmin = std::numeric_limits<double>::min() *
                          std::max(1.0, offsq.empty() ? 1.0 : *std::max_element(offsq.begin(), offsq.end()));
    int count = 0;
    double t = -x;
    if (std::fabs(t) < pivmin) t = -pivmin;
    if (t < 0) ++count;
    for (double b2 : offsq) {
        t = -x - b2 / t;
        if (std::fabs(t) < pivmin) t = -pivmin;
        if (t < 0) ++count;
    }
    return count;
}

std::vector<double> bidiagonal_singular_values(std::span<const double> diag, std::span<const double> super) {
    const std::size_t n = diag.size();
    if (n == 0) return {};
    if (super.size() + 1 != n) throw Error(ErrorCode::NumericFailure, "bidiagonal shape mismatch");
    std::vector<double> offsq;
    offsq.reserve(2 * n - 1);
    double log_det = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(diag[i] > 0.0)) throw Error(ErrorCode::NumericFailure, "bidiagonal entries must be positive");
        offsq.push_back(diag[i] * diag[i]);
        log_det += std::log(diag[i]);
        if (i + 1 < n) {
            if (!(super[i] > 0.0)) throw Error(ErrorCode::NumericFailure, "bidiagonal entries must be positive");
            offsq.push_back(super[i] * super[i]);
        }
    }
    // Gershgorin bound for the largest singular value; the product of all
    // singular values equals |det| which bounds the smallest one from below.
    double hi = 0.0;
    for (std::size_t i = 0; i < n; ++i) hi = std::max(hi, diag[i] + (i + 1 < n ? super[i] : 0.0) + (i ? super[i - 1] : 0.0));
    hi *= 1.01;
    const double log_hi = std::log(hi);
    const double log_lo = log_det - static_cast<double>(n - 1) * log_hi - 1.0;
    const int shift = static_cast<int>(n);  // the n negative eigenvalues -sigma

    std::vector<double> sigma(n);
    for (std::size_t i = 0; i < n; ++i) {
        double a = log_lo, b = log_hi;
        for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::fabs(a)); ++it) {
            const double mid = 0.5 * (a + b);
            if (zero_diagonal_sturm_count(offsq, std::exp(mid)) - shift > static_cast<int>(i))
                b = mid;
            else
                a = mid;
        }
        sigma[i] = std::exp(0.5 * (a + b));
    }
    return sigma;
}

}  // namespace hcnet
