#pragma once

#include <vector>

#include "hcnet/ctmc.hpp"
#include "hcnet/model.hpp"

namespace hcnet {

/// Birth-and-death branch on levels 0..L with 0 absorbing:
/// q(l, l+1) = a_l f(nu) for 1 <= l < L and q(l, l-1) = d_l for 1 <= l <= L.
struct BDBranch {
    int L = 1;
    std::vector<double> birth;  // a_1 .. a_{L-1}
    std::vector<double> death;  // d_1 .. d_L
    PowerLawRate rate;

    double a(int l) const { return birth.at(static_cast<std::size_t>(l - 1)); }
    double d(int l) const { return death.at(static_cast<std::size_t>(l - 1)); }
    void validate() const;

    /// a_l = L - l, d_l = l: one component of the hard-core network.
    static BDBranch standard(int L, PowerLawRate rate);
    /// a_n = 1, d_n = n: the busy-server count of an M/M/c/c system.
    static BDBranch mmc(int c, PowerLawRate rate);
};

/// Generator on levels 0..L (index = level) with no exits from 0.
SparseGenerator branch_generator(const BDBranch& branch, double nu);

/// Exact E T_{l,l-1}.
double mean_fall_time(const BDBranch& branch, int l, double nu);

/// Exact E T_{l1,l2} for L >= l1 >= l2 >= 0; zero when l1 == l2.
double mean_hitting(const BDBranch& branch, int l1, int l2, double nu);

/// Leading term of E T_{l1,l2}(nu) for any l1 > l2.
PowerTerm asym_mean_hitting(const BDBranch& branch, int l2);

struct Spectrum {
    std::vector<double> eigenvalues;  // increasing
};

/// Eigenvalues of the generator restricted to {1..L}, negated.
Spectrum escape_spectrum(const BDBranch& branch, double nu);

/// log xi_l for l = 1..L (index l-1), with xi_L = 1.
std::vector<double> log_potential_coefficients(const BDBranch& branch, double nu);

/// Symmetric tridiagonal form of -T: diagonal (level order 1..L) and the
/// off-diagonal entries between level l and l+1.
struct SymmetricTridiagonal {
    std::vector<double> diag;
    std::vector<double> off;
};
SymmetricTridiagonal symmetrized_generator(const BDBranch& branch, double nu);

/// P(T_{L,0} > t) for a hypoexponential law with these rates.
/// Throws IllConditioned when two rates are within 1e-9 relative.
double escape_law(const Spectrum& spectrum, double t);

/// Survival of T_{l,0} that falls back to uniformization whenever the
/// closed form is ill-conditioned or the start level is not L.
class EscapeLaw {
public:
    EscapeLaw(const BDBranch& branch, double nu, int start);
    double survival(double t) const;
    const Spectrum& spectrum() const { return spectrum_; }
    bool closed_form() const { return closed_form_; }

private:
    BDBranch branch_;
    double nu_;
    int start_;
    Spectrum spectrum_;
    bool closed_form_ = false;
};

/// Survival of T_{start,0} by uniformization.
double escape_survival_uniformized(const BDBranch& branch, double nu, int start, double t, double tol = 1e-12);

struct GershgorinEnvelope {
    double A = 0, B = 0, C = 0, D = 0;
    double theta1_upper = 0;  // A + B sqrt(f)
    double rest_lower = 0;    // C f - D sqrt(f)
};

/// Throws DiscsOverlap, naming the nu above which the discs separate,
/// when the disc of level L still meets the others.
GershgorinEnvelope gershgorin_envelope(const BDBranch& branch, double nu);

/// E T of hitting `targets` from `source` by elimination on the first-step system.
double exact_mean_hitting_oracle(const SparseGenerator& gen, int source, const std::vector<char>& targets);

}  // namespace hcnet
