#include "hcnet/asymptotics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "hcnet/error.hpp"
#include "hcnet/rng.hpp"
#include "hcnet/stats.hpp"

namespace hcnet {

namespace {

constexpr double kTieTolerance = 1e-12;

bool nearly_equal(double a, double b) {
    return std::fabs(a - b) <= kTieTolerance * std::max({std::fabs(a), std::fabs(b), 1e-300});
}

}  // namespace

BranchClassification classify(const Network& net, int k1, int l1, int k2, int l2) {
    const int K = net.num_components();
    if (k1 < 0 || k1 >= K || k2 < 0 || k2 >= K)
        throw Error(ErrorCode::LevelOutOfRange, "branch index outside 1.." + std::to_string(K));
    if (k1 == k2) throw Error(ErrorCode::SameBranch, "source and target lie in the same branch");
    if (l1 < 1 || l1 > net.size(k1) || l2 < 1 || l2 > net.size(k2))
        throw Error(ErrorCode::LevelOutOfRange, "level outside its branch");
    for (int k = 0; k < K; ++k) {
        if (!net.component(k).intra_edges.empty())
            throw Error(ErrorCode::AggregationInvalid, "classification requires the complete K-partite model");
        if (net.component(k).has_user_rates())
            throw Error(ErrorCode::NotPowerLaw, "component " + std::to_string(k + 1) + " has no single power-law rate");
    }

    BranchClassification c;
    c.k1 = k1;
    c.l1 = l1;
    c.k2 = k2;
    c.l2 = l2;
    c.gamma.assign(static_cast<std::size_t>(K), 0.0);
    c.beta.assign(static_cast<std::size_t>(K), 0.0);

    // gamma: the largest exponent a_k L_k among k != k2 takes all the mass.
    Rational emax(0);
    bool first = true;
    for (int k = 0; k < K; ++k) {
        if (k == k2) continue;
        const Rational e = net.rate(k).exponent * Rational(net.size(k));
        if (first || e > emax) emax = e;
        first = false;
    }
    std::vector<double> logw;
    for (int k = 0; k < K; ++k) {
        if (k == k2) continue;
        if (net.rate(k).exponent * Rational(net.size(k)) == emax) {
            c.K_star.push_back(k);
            logw.push_back(net.size(k) * std::log(net.rate(k).coefficient));
        }
    }
    const double wmax = *std::max_element(logw.begin(), logw.end());
    double wsum = 0.0;
    for (double& w : logw) wsum += (w = std::exp(w - wmax));
    for (std::size_t i = 0; i < c.K_star.size(); ++i) c.gamma[static_cast<std::size_t>(c.K_star[i])] = logw[i] / wsum;

    // beta: compare the activation exponents with the target's.
    const auto& target = net.rate(k2);
    for (int k : c.K_star) {
        const auto& r = net.rate(k);
        auto& b = c.beta[static_cast<std::size_t>(k)];
        const double g = c.gamma[static_cast<std::size_t>(k)];
        if (r.exponent < target.exponent) {
            b = 0.0;
            c.N.push_back(k);
            c.gammaN += g;
        } else if (r.exponent == target.exponent) {
            b = net.size(k) * r.coefficient / (net.size(k2) * target.coefficient);
            c.A.push_back(k);
            c.gammaA += g;
            c.betaA += b;
        } else {
            b = std::numeric_limits<double>::infinity();
            c.S.push_back(k);
            c.gammaS += g;
        }
    }

    // alpha from the leading terms of E A and E B.
    const int L1 = net.size(k1);
    c.escape_term = PowerTerm{1.0 / L1, Rational(0)} * as_term(net.rate(k1)).pow(L1 - 1);
    double visit_coeff = 0.0;
    for (int k : c.K_star) visit_coeff += std::pow(net.rate(k).coefficient, net.size(k));
    c.visit_term = PowerTerm{visit_coeff / (net.size(k2) * target.coefficient), emax - target.exponent};
    const Rational ea = c.escape_term.exponent, eb = c.visit_term.exponent;
    enum class Regime { Zero, Interior, One } regime;
    if (ea > eb) {
        regime = Regime::One;
        c.alpha = 1.0;
    } else if (ea < eb) {
        regime = Regime::Zero;
        c.alpha = 0.0;
    } else {
        regime = Regime::Interior;
        c.alpha = c.escape_term.coefficient / (c.escape_term.coefficient + c.visit_term.coefficient);
    }

    auto all_ratios = [&](double target_ratio) {
        for (int k : c.A)
            if (!nearly_equal(c.beta[static_cast<std::size_t>(k)] / c.gamma[static_cast<std::size_t>(k)], target_ratio))
                return false;
        return true;
    };
    const bool common_ratio =
        !c.A.empty() && all_ratios(c.beta[static_cast<std::size_t>(c.A[0])] / c.gamma[static_cast<std::size_t>(c.A[0])]);
    const bool hasA = !c.A.empty(), hasS = !c.S.empty();

    if (regime == Regime::One) {
        c.scenario = "3";
    } else if (regime == Regime::Zero) {
        if (!hasA && !hasS) c.scenario = "1a";
        else if (hasA && !hasS) c.scenario = common_ratio ? "1b*" : "1b";
        else if (!hasA) c.scenario = "1c";
        else c.scenario = "1d";
    } else {
        const double odds = (1.0 - c.alpha) / c.alpha;
        if (!hasA && !hasS) {
            c.scenario = "2a";
        } else if (hasA && !hasS) {
            if (all_ratios(odds) && nearly_equal(odds, c.betaA)) c.scenario = "2b***";
            else if (all_ratios(odds)) c.scenario = "2b**";
            else if (common_ratio) c.scenario = "2b*";
            else c.scenario = "2b";
        } else if (!hasA) {
            c.scenario = nearly_equal(c.alpha, c.gammaS / (1.0 + c.gammaS)) ? "2c*" : "2c";
        } else {
            c.scenario = "2d";
        }
    }
    c.alias = c.scenario;
    if (const auto star = c.alias.find('*'); star != std::string::npos) c.alias.erase(star);
    return c;
}

PowerTerm asym_mean_transition(const BranchClassification& c) { return c.escape_term + c.visit_term; }

LimitLaw::LimitLaw(const BranchClassification& c)
    : alpha_(c.alpha), gammaN_(c.gammaN), gammaS_(c.gammaS), betaA_(c.betaA), scenario_(c.scenario) {
    for (int k : c.A) {
        gammaA_k_.push_back(c.gamma[static_cast<std::size_t>(k)]);
        betaA_k_.push_back(c.beta[static_cast<std::size_t>(k)]);
    }
    build();
}

void LimitLaw::build() {
    // L_W = P / Den with P = prod_A (1 + gamma_k s / beta_k).
    Polynomial P = Polynomial::constant(1.0);
    std::vector<Polynomial> factors;
    for (std::size_t i = 0; i < gammaA_k_.size(); ++i) {
        factors.push_back(Polynomial::linear(1.0, gammaA_k_[i] / betaA_k_[i]));
        P = P * factors.back();
    }
    Polynomial den = P * Polynomial::linear(1.0, gammaS_);
    for (std::size_t i = 0; i < factors.size(); ++i) {
        Polynomial term = Polynomial::linear(0.0, gammaA_k_[i]);
        for (std::size_t j = 0; j < factors.size(); ++j)
            if (j != i) term = term * factors[j];
        den = den + term;
    }
    const double w = 1.0 - alpha_;
    transform_.num = P.scaled(w);
    transform_.den = Polynomial::linear(1.0, alpha_) * den.scaled(w);

    atom_ = 0.0;
    std::vector<double> cont = transform_.num.coefficients();
    if (transform_.num.degree() == transform_.den.degree()) {
        atom_ = transform_.num.leading() / transform_.den.leading();
        const auto& d = transform_.den.coefficients();
        for (std::size_t i = 0; i < cont.size(); ++i) cont[i] -= atom_ * d[i];
        cont.back() = 0.0;
    }
    cont_num_ = Polynomial(std::move(cont));
}

LimitLaw LimitLaw::w_law() const {
    LimitLaw w = *this;
    w.alpha_ = 0.0;
    bool hasA = !gammaA_k_.empty(), hasS = gammaS_ > 0.0;
    if (!hasA && !hasS) w.scenario_ = "1a";
    else if (hasA && !hasS) {
        bool common = true;
        for (std::size_t i = 0; i < gammaA_k_.size(); ++i)
            common = common && nearly_equal(betaA_k_[i] / gammaA_k_[i], betaA_k_[0] / gammaA_k_[0]);
        w.scenario_ = common ? "1b*" : "1b";
    } else if (!hasA) w.scenario_ = "1c";
    else w.scenario_ = "1d";
    w.build();
    return w;
}

bool LimitLaw::closed_form() const {
    return scenario_ != "1b" && scenario_ != "1d" && scenario_ != "2b" && scenario_ != "2d";
}

namespace {

double exp_cdf(double mean, double x) { return -std::expm1(-x / mean); }
double exp_pdf(double mean, double x) { return std::exp(-x / mean) / mean; }

// Sum of two independent exponentials with rates r1, r2.
double hypo2_cdf(double r1, double r2, double x) {
    if (nearly_equal(r1, r2) || std::fabs(r1 - r2) < 1e-9 * std::max(r1, r2)) {
        const double r = 0.5 * (r1 + r2);
        return -std::expm1(-r * x) - r * x * std::exp(-r * x);
    }
    return 1.0 - (r2 * std::exp(-r1 * x) - r1 * std::exp(-r2 * x)) / (r2 - r1);
}
double hypo2_pdf(double r1, double r2, double x) {
    if (std::fabs(r1 - r2) < 1e-9 * std::max(r1, r2)) {
        const double r = 0.5 * (r1 + r2);
        return r * r * x * std::exp(-r * x);
    }
    // r1 r2 (e^{-r1 x} - e^{-r2 x}) / (r2 - r1), written to avoid cancellation.
    const double lo = std::min(r1, r2), hi = std::max(r1, r2);
    return r1 * r2 * std::exp(-lo * x) * -std::expm1(-(hi - lo) * x) / (hi - lo);
}

}  // namespace

double LimitLaw::closed_cdf(double x) const {
    const double a = alpha_;
    const double p = 1.0 / (1.0 + betaA_);
    const double lambda = gammaA_k_.empty() ? 0.0 : betaA_k_[0] / gammaA_k_[0];
    if (scenario_ == "1a") return 1.0;
    if (scenario_ == "1b*") return 1.0 - (1.0 - p) * std::exp(-p * lambda * x);
    if (scenario_ == "1c") return exp_cdf(gammaS_, x);
    if (scenario_ == "2a") return exp_cdf(a, x);
    if (scenario_ == "2b*") {
        const double mu = p * lambda / (1.0 - a);
        return p * exp_cdf(a, x) + (1.0 - p) * hypo2_cdf(1.0 / a, mu, x);
    }
    if (scenario_ == "2b**") return exp_cdf(a * (1.0 + betaA_), x);
    if (scenario_ == "2b***" || scenario_ == "3") return exp_cdf(1.0, x);
    if (scenario_ == "2c") return hypo2_cdf(1.0 / a, 1.0 / ((1.0 - a) * gammaS_), x);
    if (scenario_ == "2c*") return hypo2_cdf(1.0 / a, 1.0 / a, x);
    throw Error(ErrorCode::NumericFailure, "no closed form for scenario " + scenario_);
}

double LimitLaw::closed_pdf(double x) const {
    const double a = alpha_;
    const double p = 1.0 / (1.0 + betaA_);
    const double lambda = gammaA_k_.empty() ? 0.0 : betaA_k_[0] / gammaA_k_[0];
    if (scenario_ == "1a") return 0.0;
    if (scenario_ == "1b*") return (1.0 - p) * p * lambda * std::exp(-p * lambda * x);
    if (scenario_ == "1c") return exp_pdf(gammaS_, x);
    if (scenario_ == "2a") return exp_pdf(a, x);
    if (scenario_ == "2b*") {
        const double mu = p * lambda / (1.0 - a);
        return p * exp_pdf(a, x) + (1.0 - p) * hypo2_pdf(1.0 / a, mu, x);
    }
    if (scenario_ == "2b**") return exp_pdf(a * (1.0 + betaA_), x);
    if (scenario_ == "2b***" || scenario_ == "3") return exp_pdf(1.0, x);
    if (scenario_ == "2c") return hypo2_pdf(1.0 / a, 1.0 / ((1.0 - a) * gammaS_), x);
    if (scenario_ == "2c*") return hypo2_pdf(1.0 / a, 1.0 / a, x);
    throw Error(ErrorCode::NumericFailure, "no closed form for scenario " + scenario_);
}

double LimitLaw::cdf(double x) const {
    if (x < 0.0) return 0.0;
    if (closed_form()) return std::clamp(closed_cdf(x), 0.0, 1.0);
    return cdf_inverted(x);
}

double LimitLaw::pdf(double x) const {
    if (x < 0.0) return 0.0;
    if (closed_form()) return closed_pdf(x);
    return pdf_inverted(x);
}

namespace {

void check_agreement(double a, double b, double x, const char* what) {
    if (!(std::fabs(a - b) <= 1e-6) || !std::isfinite(a)) {
        std::ostringstream os;
        os.precision(17);
        os << what << " inversion unstable at x=" << x << " (" << a << " vs " << b << ")";
        throw Error(ErrorCode::InversionUnstable, os.str());
    }
}

}  // namespace

double LimitLaw::cdf_inverted(double x) const {
    if (x < 0.0) return 0.0;
    if (x == 0.0) return atom_;
    if (cont_num_.degree() < 0) return atom_;
    auto F = [this](std::complex<double> s) { return cont_num_(s) / (transform_.den(s) * s); };
    const double v32 = talbot_invert(F, x, 32);
    const double v24 = talbot_invert(F, x, 24);
    check_agreement(v32, v24, x, "CDF");
    return std::clamp(atom_ + v32, 0.0, 1.0);
}

double LimitLaw::pdf_inverted(double x) const {
    if (x < 0.0) return 0.0;
    if (cont_num_.degree() < 0) return 0.0;
    if (x == 0.0) {
        if (cont_num_.degree() == transform_.den.degree() - 1) return cont_num_.leading() / transform_.den.leading();
        return 0.0;
    }
    auto F = [this](std::complex<double> s) { return cont_num_(s) / transform_.den(s); };
    const double v32 = talbot_invert(F, x, 32);
    const double v24 = talbot_invert(F, x, 24);
    check_agreement(v32, v24, x, "PDF");
    return v32;
}

MarkedPoissonResult marked_poisson_check(const BranchClassification& c, std::int64_t samples, std::uint64_t seed) {
    if (c.A.empty() || c.S.empty())
        throw Error(ErrorCode::WrongScenario, "marked Poisson representation needs attracting and strongly attracting branches");
    if (samples < 1) throw Error(ErrorCode::ConfigError, "samples must be positive");
    const double lambda = c.betaA / c.gammaS;
    std::vector<double> cum, rates;
    double acc = 0.0;
    for (int k : c.A) {
        acc += c.beta[static_cast<std::size_t>(k)] / c.betaA;
        cum.push_back(acc);
        rates.push_back(c.beta[static_cast<std::size_t>(k)] / c.gamma[static_cast<std::size_t>(k)]);
    }
    std::vector<double> w(static_cast<std::size_t>(samples));
    for (std::int64_t i = 0; i < samples; ++i) {
        Rng rng(seed, static_cast<std::uint64_t>(i));
        const double T = rng.exponential(1.0 / c.gammaS);
        double total = T;
        for (double t = rng.exponential(lambda); t <= T; t += rng.exponential(lambda)) {
            const double u = rng.uniform();
            std::size_t k = 0;
            while (k + 1 < cum.size() && u > cum[k]) ++k;
            total += rng.exponential(rates[k]);
        }
        w[static_cast<std::size_t>(i)] = total;
    }
    const LimitLaw law = LimitLaw(c).w_law();
    MarkedPoissonResult r;
    r.ks = ks_statistic(w, [&](double x) { return law.cdf(x); });
    const auto s = summarize(w);
    r.mean = s.mean;
    r.standard_error = s.standard_error;
    r.expected_mean = 1.0 - c.gammaN;
    return r;
}

ExtensionConstants extension_constants(const Component& component) {
    const auto sets = component_independent_sets(component);
    ExtensionConstants ec;
    bool first = true;
    std::vector<PowerTerm> weights;
    for (FullState s : sets) {
        PowerTerm w{1.0, Rational(0)};
        for (FullState rest = s; rest; rest &= rest - 1) w = w * as_term(component.user_rate(std::countr_zero(rest)));
        weights.push_back(w);
        if (first || w.exponent > ec.g.exponent || (w.exponent == ec.g.exponent && w.coefficient > ec.g.coefficient)) {
            ec.g = w;
            ec.argmax = s;
        }
        first = false;
    }
    double z = 0.0;
    for (const auto& w : weights)
        if (w.exponent == ec.g.exponent) z += w.coefficient;
    ec.psi = z / ec.g.coefficient;
    ec.eta = component.user_rate(0).exponent;
    ec.F = PowerTerm{};
    for (int u = 0; u < component.size; ++u) {
        ec.eta = std::min(ec.eta, component.user_rate(u).exponent);
        ec.F = ec.F + as_term(component.user_rate(u));
    }
    ec.escape_mean = PowerTerm{ec.psi * ec.g.coefficient, ec.g.exponent} / ec.F;
    return ec;
}

}  // namespace hcnet
