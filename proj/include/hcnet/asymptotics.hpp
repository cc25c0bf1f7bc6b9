#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcnet/laplace.hpp"
#include "hcnet/model.hpp"

namespace hcnet {

/// Limit parameters of the transition (k1, l1) -> (k2, l2). Branch indices
/// are 0-based; per-branch vectors have one entry per component.
struct BranchClassification {
    int k1 = 0, l1 = 1, k2 = 1, l2 = 1;
    /// Limiting share of the non-target stationary mass; 0 at k2.
    std::vector<double> gamma;
    /// Limiting visit ratio to the target branch; meaningful on K_star only.
    std::vector<double> beta;
    double alpha = 0.0;
    std::vector<int> K_star, N, A, S;
    double gammaN = 0.0, gammaA = 0.0, gammaS = 0.0, betaA = 0.0;
    /// Most specific Table-1 label, and the generic row it refines.
    std::string scenario, alias;
    /// Leading terms of the initial escape time and of the dominant visits.
    PowerTerm escape_term, visit_term;
};

/// Throws SameBranch, LevelOutOfRange, NotPowerLaw or AggregationInvalid.
BranchClassification classify(const Network& net, int k1, int l1, int k2, int l2);

/// Leading term of E T_{(k1,l1),(k2,l2)}(nu).
PowerTerm asym_mean_transition(const BranchClassification& c);

/// Law of Z = alpha Y + (1 - alpha) W.
class LimitLaw {
public:
    explicit LimitLaw(const BranchClassification& c);

    double alpha() const { return alpha_; }
    double atom_at_zero() const { return atom_; }
    double mean() const { return alpha_ + (1.0 - alpha_) * (1.0 - gammaN_); }
    const std::string& scenario() const { return scenario_; }
    /// True when the CDF and PDF have a closed form for this scenario.
    bool closed_form() const;

    const RationalTransform& transform() const { return transform_; }
    double laplace(double s) const { return transform_(s); }
    std::complex<double> laplace(std::complex<double> s) const { return transform_(s); }

    double cdf(double x) const;
    /// Density of the absolutely continuous part.
    double pdf(double x) const;
    /// Numerical inversion regardless of closed forms; throws
    /// InversionUnstable when two node counts disagree beyond 1e-6.
    double cdf_inverted(double x) const;
    double pdf_inverted(double x) const;

    /// The same law with alpha = 0, i.e. the law of W.
    LimitLaw w_law() const;

private:
    LimitLaw() = default;
    void build();
    double closed_cdf(double x) const;
    double closed_pdf(double x) const;

    double alpha_ = 0.0, atom_ = 0.0, gammaN_ = 0.0, gammaS_ = 0.0, betaA_ = 0.0;
    std::vector<double> gammaA_k_, betaA_k_;
    std::string scenario_;
    RationalTransform transform_;
    Polynomial cont_num_;  // numerator of L_Z - atom over the same denominator
};

struct MarkedPoissonResult {
    double ks = 0.0;
    double mean = 0.0;
    double standard_error = 0.0;
    double expected_mean = 0.0;
};

/// Simulates W as T + (marks on a Poisson process over [0, T]) and compares
/// it with the W law. Throws WrongScenario unless A and S are both nonempty.
MarkedPoissonResult marked_poisson_check(const BranchClassification& c, std::int64_t samples, std::uint64_t seed);

struct ExtensionConstants {
    PowerTerm g;       // leading term of max over independent sets
    FullState argmax = 0;
    double psi = 0.0;  // lim Z / g
    Rational eta;      // min user exponent
    PowerTerm F;       // aggregate activation rate of the component
    PowerTerm escape_mean;
};

/// Constants of a component with intra-component conflicts. Throws TooLarge.
ExtensionConstants extension_constants(const Component& component);

}  // namespace hcnet
