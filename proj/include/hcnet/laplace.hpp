#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace hcnet {

/// Real polynomial, coefficients in increasing degree.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs);

    static Polynomial constant(double c) { return Polynomial({c}); }
    /// c0 + c1 s
    static Polynomial linear(double c0, double c1) { return Polynomial({c0, c1}); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    double leading() const { return c_.empty() ? 0.0 : c_.back(); }
    const std::vector<double>& coefficients() const { return c_; }
    double coefficient(int i) const { return i <= degree() ? c_[static_cast<std::size_t>(i)] : 0.0; }

    double operator()(double s) const;
    std::complex<double> operator()(std::complex<double> s) const;
    /// p(k s)
    Polynomial scaled(double k) const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(double k, const Polynomial& a);

private:
    void trim();
    std::vector<double> c_;
};

/// N(s) / D(s).
struct RationalTransform {
    Polynomial num;
    Polynomial den;

    double operator()(double s) const { return num(s) / den(s); }
    std::complex<double> operator()(std::complex<double> s) const { return num(s) / den(s); }
};

using ComplexFunction = std::function<std::complex<double>(std::complex<double>)>;

/// Fixed-Talbot inversion of F at t > 0 with M nodes.
double talbot_invert(const ComplexFunction& F, double t, int M = 32);

}  // namespace hcnet
