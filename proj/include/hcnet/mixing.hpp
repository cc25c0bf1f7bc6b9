#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hcnet/model.hpp"

namespace hcnet {

struct ConductanceReport {
    std::string subset;          // human-readable description
    std::vector<int> states;     // StarSpace indices, sorted
    double flow = 0.0;           // Q(S, S^c)
    double mass = 0.0;           // pi_S
    double phi = 0.0;            // flow / mass
    /// Leading term of phi when S is a whole branch.
    std::optional<PowerTerm> asymptotic;
};

/// Conductance of a set of aggregated states. Throws EmptySubset, FullSubset.
ConductanceReport conductance(const Network& net, double nu, std::vector<int> states);

/// Conductance of branch B_k, with its asymptotic form L c^{1-L} nu^{-a(L-1)}.
ConductanceReport branch_conductance(const Network& net, double nu, int k);

/// Limiting stationary mass of each branch, by exponent comparison.
std::vector<double> limiting_branch_mass(const Network& net);

/// Branch with the largest asymptotic mean escape time among those whose
/// limiting mass is at most r. Throws NoEligibleBranch.
int kappa_branch(const Network& net, double r);

struct MixingBound {
    double r = 0.5;
    double epsilon = 0.1;
    int kappa = 0;
    double phi = 0.0;
    /// (1 - r - 2 eps) / Phi(B_kappa), a lower bound on t_mix(eps).
    double bound = 0.0;
    /// (1 - r - 2 eps) f_kappa^{L-1} / L.
    PowerTerm asymptotic;
    std::optional<double> exact;
    std::string certification = "branch-certified";
};

/// Throws BadEpsilon unless 0 < r < 1 and 0 < eps < (1 - r)/2.
MixingBound mixing_lower_bound(const Network& net, double nu, double r, double epsilon);

/// max_x || P_t(x, .) - pi ||_TV on the aggregated chain. Throws TooLarge
/// beyond 1e4 states.
double tv_distance(const Network& net, double nu, double t);

/// First t with tv_distance(t) <= eps, to relative precision 1e-6.
/// Throws BadEpsilon, TooLarge, NonConvergent.
double t_mix_exact(const Network& net, double nu, double epsilon);

}  // namespace hcnet
