#include "hcnet/bd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hcnet/error.hpp"
#include "hcnet/tridiag.hpp"

namespace hcnet {

void BDBranch::validate() const {
    if (L < 1) throw Error(ErrorCode::EmptyComponent, "branch needs L >= 1");
    if (static_cast<int>(birth.size()) != L - 1 || static_cast<int>(death.size()) != L)
        throw Error(ErrorCode::ConfigError, "branch needs L-1 birth and L death coefficients");
    for (double x : birth)
        if (!(x > 0.0) || !std::isfinite(x)) throw Error(ErrorCode::ConfigError, "birth coefficients must be positive");
    for (double x : death)
        if (!(x > 0.0) || !std::isfinite(x)) throw Error(ErrorCode::ConfigError, "death coefficients must be positive");
    rate.validate();
}

BDBranch BDBranch::standard(int L, PowerLawRate rate) {
    BDBranch b;
    b.L = L;
    b.rate = rate;
    for (int l = 1; l < L; ++l) b.birth.push_back(L - l);
    for (int l = 1; l <= L; ++l) b.death.push_back(l);
    return b;
}

BDBranch BDBranch::mmc(int c, PowerLawRate rate) {
    BDBranch b;
    b.L = c;
    b.rate = rate;
    b.birth.assign(static_cast<std::size_t>(std::max(c - 1, 0)), 1.0);
    for (int n = 1; n <= c; ++n) b.death.push_back(n);
    return b;
}

namespace {

void check_level(const BDBranch& b, int l, int lo) {
    if (l < lo || l > b.L)
        throw Error(ErrorCode::LevelOutOfRange,
                    "level " + std::to_string(l) + " outside [" + std::to_string(lo) + "," + std::to_string(b.L) + "]");
}

}  // namespace

SparseGenerator branch_generator(const BDBranch& branch, double nu) {
    branch.validate();
    const double f = branch.rate.at(nu);
    SparseGenerator gen(branch.L + 1);
    for (int l = 1; l <= branch.L; ++l) {
        gen.add_rate(l, l - 1, branch.d(l));
        if (l < branch.L) gen.add_rate(l, l + 1, branch.a(l) * f);
    }
    return gen;
}

double mean_fall_time(const BDBranch& branch, int l, double nu) {
    branch.validate();
    check_level(branch, l, 1);
    const double logf = branch.rate.log_at(nu);
    // log(pi_n / pi_l) accumulated upward, then a stable log-sum-exp.
    std::vector<double> logs{0.0};
    double acc = 0.0;
    for (int n = l; n < branch.L; ++n) {
        acc += std::log(branch.a(n)) + logf - std::log(branch.d(n + 1));
        logs.push_back(acc);
    }
    const double m = *std::max_element(logs.begin(), logs.end());
    double s = 0.0;
    for (double x : logs) s += std::exp(x - m);
    return std::exp(m + std::log(s)) / branch.d(l);
}

double mean_hitting(const BDBranch& branch, int l1, int l2, double nu) {
    check_level(branch, l1, 0);
    check_level(branch, l2, 0);
    if (l1 < l2) throw Error(ErrorCode::LevelOutOfRange, "mean_hitting needs l1 >= l2");
    double total = 0.0;
    for (int l = l2 + 1; l <= l1; ++l) total += mean_fall_time(branch, l, nu);
    return total;
}

PowerTerm asym_mean_hitting(const BDBranch& branch, int l2) {
    branch.validate();
    if (l2 < 0 || l2 >= branch.L) throw Error(ErrorCode::LevelOutOfRange, "asymptotic mean needs 0 <= l2 < L");
    double coeff = 1.0 / branch.d(l2 + 1);
    for (int i = l2 + 1; i <= branch.L - 1; ++i) coeff *= branch.a(i) / branch.d(i + 1);
    const int power = branch.L - l2 - 1;
    return PowerTerm{coeff, Rational(0)} * as_term(branch.rate).pow(power);
}

std::vector<double> log_potential_coefficients(const BDBranch& branch, double nu) {
    branch.validate();
    const double logf = branch.rate.log_at(nu);
    std::vector<double> logxi(static_cast<std::size_t>(branch.L));
    logxi.back() = 0.0;
    for (int l = branch.L; l >= 2; --l)
        logxi[static_cast<std::size_t>(l - 2)] =
            logxi[static_cast<std::size_t>(l - 1)] + std::log(branch.d(l)) - std::log(branch.a(l - 1)) - logf;
    return logxi;
}

SymmetricTridiagonal symmetrized_generator(const BDBranch& branch, double nu) {
    branch.validate();
    const double f = branch.rate.at(nu);
    const auto logxi = log_potential_coefficients(branch, nu);
    SymmetricTridiagonal g;
    for (int l = 1; l <= branch.L; ++l) g.diag.push_back(branch.d(l) + (l < branch.L ? branch.a(l) * f : 0.0));
    // Similarity by diag(sqrt(xi)): entry (l, l+1) becomes -T(l,l+1) * sqrt(xi_l / xi_{l+1}).
    for (int l = 1; l < branch.L; ++l) {
        const double half = 0.5 * (logxi[static_cast<std::size_t>(l - 1)] - logxi[static_cast<std::size_t>(l)]);
        g.off.push_back(-branch.a(l) * f * std::exp(half));
    }
    return g;
}

Spectrum escape_spectrum(const BDBranch& branch, double nu) {
    branch.validate();
    const double f = branch.rate.at(nu);
    // -T = U U^T with U upper bidiagonal: diag sqrt(d_l), super sqrt(a_l f).
    std::vector<double> diag, super;
    for (int l = 1; l <= branch.L; ++l) {
        diag.push_back(std::sqrt(branch.d(l)));
        if (l < branch.L) super.push_back(std::sqrt(branch.a(l) * f));
    }
    Spectrum s;
    for (double sigma : bidiagonal_singular_values(diag, super)) s.eigenvalues.push_back(sigma * sigma);
    for (std::size_t i = 0; i + 1 < s.eigenvalues.size(); ++i) {
        const double a = s.eigenvalues[i], b = s.eigenvalues[i + 1];
        if (!(a > 0.0) || !(b - a > 1e-12 * b))
            throw Error(ErrorCode::NumericFailure, "eigenvalues not separated: " + std::to_string(a) + ", " + std::to_string(b));
    }
    if (!s.eigenvalues.empty() && !(s.eigenvalues.front() > 0.0))
        throw Error(ErrorCode::NumericFailure, "nonpositive eigenvalue");
    return s;
}

double escape_law(const Spectrum& spectrum, double t) {
    const auto& th = spectrum.eigenvalues;
    const std::size_t n = th.size();
    if (n == 0) return 0.0;
    if (t <= 0.0) return 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (th[i + 1] - th[i] < 1e-9 * th[i + 1])
            throw Error(ErrorCode::IllConditioned, "rates " + std::to_string(th[i]) + " and " + std::to_string(th[i + 1]) +
                                                       " nearly coincide");
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double logc = 0.0;
        bool negative = false;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double diff = th[j] - th[i];
            logc += std::log(th[j]) - std::log(std::fabs(diff));
            negative ^= diff < 0.0;
        }
        const double term = (negative ? -1.0 : 1.0) * std::exp(logc - th[i] * t);
        const double next = sum + term;
        comp += std::fabs(sum) >= std::fabs(term) ? (sum - next) + term : (term - next) + sum;
        sum = next;
    }
    return std::clamp(sum + comp, 0.0, 1.0);
}

double escape_survival_uniformized(const BDBranch& branch, double nu, int start, double t, double tol) {
    check_level(branch, start, 1);
    if (t <= 0.0) return 1.0;
    const auto gen = branch_generator(branch, nu);
    std::vector<double> p0(static_cast<std::size_t>(branch.L + 1), 0.0);
    p0[static_cast<std::size_t>(start)] = 1.0;
    const auto p = transient_distribution(gen, p0, t, tol);
    double alive = 0.0;
    for (int l = 1; l <= branch.L; ++l) alive += p[static_cast<std::size_t>(l)];
    return std::clamp(alive, 0.0, 1.0);
}

EscapeLaw::EscapeLaw(const BDBranch& branch, double nu, int start)
    : branch_(branch), nu_(nu), start_(start), spectrum_(escape_spectrum(branch, nu)) {
    check_level(branch, start, 1);
    closed_form_ = start == branch.L;
    const auto& th = spectrum_.eigenvalues;
    for (std::size_t i = 0; i + 1 < th.size(); ++i)
        if (th[i + 1] - th[i] < 1e-9 * th[i + 1]) closed_form_ = false;
}

double EscapeLaw::survival(double t) const {
    if (closed_form_) return escape_law(spectrum_, t);
    return escape_survival_uniformized(branch_, nu_, start_, t);
}

namespace {

struct Discs {
    double top_edge;     // d_L + R_L
    double others_edge;  // min over l < L of centre_l - R_l
};

Discs disc_edges(const BDBranch& b, double f) {
    auto offdiag = [&](int l) {  // |G| entry between levels l and l+1
        return std::sqrt(b.a(l) * f * b.d(l + 1));
    };
    Discs d{b.d(b.L) + offdiag(b.L - 1), std::numeric_limits<double>::infinity()};
    for (int l = 1; l < b.L; ++l) {
        const double radius = offdiag(l) + (l > 1 ? offdiag(l - 1) : 0.0);
        d.others_edge = std::min(d.others_edge, b.d(l) + b.a(l) * f - radius);
    }
    return d;
}

}  // namespace

GershgorinEnvelope gershgorin_envelope(const BDBranch& branch, double nu) {
    branch.validate();
    GershgorinEnvelope env;
    env.A = branch.d(branch.L);
    if (branch.L == 1) {
        env.theta1_upper = env.A;
        env.rest_lower = std::numeric_limits<double>::infinity();
        return env;
    }
    env.B = std::sqrt(branch.d(branch.L) * branch.a(branch.L - 1));
    env.C = *std::min_element(branch.birth.begin(), branch.birth.end());
    for (int l = 1; l < branch.L; ++l) {
        double r = std::sqrt(branch.d(l + 1) * branch.a(l));
        if (l > 1) r += std::sqrt(branch.d(l) * branch.a(l - 1));
        env.D = std::max(env.D, r);
    }
    auto separated = [&](double x) {
        const auto d = disc_edges(branch, branch.rate.at(x));
        return d.top_edge < d.others_edge;
    };
    if (!separated(nu)) {
        double lo = nu, hi = nu;
        while (!separated(hi) && hi < 1e300) {
            lo = hi;
            hi *= 2.0;
        }
        for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-12; ++it) {
            const double mid = std::sqrt(lo * hi);
            (separated(mid) ? hi : lo) = mid;
        }
        std::ostringstream os;
        os.precision(17);
        os << "Gershgorin discs overlap at nu=" << nu << "; they separate for nu >= " << hi;
        throw Error(ErrorCode::DiscsOverlap, os.str());
    }
    const double sf = std::sqrt(branch.rate.at(nu));
    env.theta1_upper = env.A + env.B * sf;
    env.rest_lower = env.C * sf * sf - env.D * sf;
    return env;
}

double exact_mean_hitting_oracle(const SparseGenerator& gen, int source, const std::vector<char>& targets) {
    return mean_hitting_time(gen, source, targets);
}

}  // namespace hcnet
