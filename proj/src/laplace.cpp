#include "hcnet/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hcnet/error.hpp"

namespace hcnet {

Polynomial::Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }

void Polynomial::trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double Polynomial::operator()(double s) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
    return acc;
}

std::complex<double> Polynomial::operator()(std::complex<double> s) const {
    std::complex<double> acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
    return acc;
}

Polynomial Polynomial::scaled(double k) const {
    std::vector<double> out(c_);
    double p = 1.0;
    for (double& x : out) {
        x *= p;
        p *= k;
    }
    return Polynomial(std::move(out));
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> out(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) out[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) out[i] += b.c_[i];
    return Polynomial(std::move(out));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.c_.empty() || b.c_.empty()) return {};
    std::vector<double> out(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(out));
}

Polynomial operator*(double k, const Polynomial& a) {
    std::vector<double> out(a.c_);
    for (double& x : out) x *= k;
    return Polynomial(std::move(out));
}

double talbot_invert(const ComplexFunction& F, double t, int M) {
    if (!(t > 0.0)) throw Error(ErrorCode::InversionUnstable, "Talbot inversion needs t > 0");
    const double r = 2.0 * M / (5.0 * t);
    double acc = 0.5 * std::exp(r * t) * F({r, 0.0}).real();
    for (int k = 1; k < M; ++k) {
        const double theta = k * std::numbers::pi / M;
        const double cot = 1.0 / std::tan(theta);
        const std::complex<double> s(r * theta * cot, r * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        acc += (std::exp(t * s) * F(s) * std::complex<double>(1.0, sigma)).real();
    }
    return acc * r / M;
}

}  // namespace hcnet
