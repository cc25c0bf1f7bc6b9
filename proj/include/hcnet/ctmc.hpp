#pragma once

#include <span>
#include <vector>

namespace hcnet {

struct Transition {
    int to;
    double rate;
};

/// Off-diagonal rates of a finite continuous-time Markov chain.
class SparseGenerator {
public:
    explicit SparseGenerator(int n = 0) : out_(static_cast<std::size_t>(n)) {}

    int size() const { return static_cast<int>(out_.size()); }
    /// Adds to the rate from -> to; zero rates and self-loops are ignored.
    void add_rate(int from, int to, double rate);
    std::span<const Transition> transitions(int from) const { return out_.at(static_cast<std::size_t>(from)); }
    double exit_rate(int from) const;
    double max_exit_rate() const;

private:
    std::vector<std::vector<Transition>> out_;
};

/// Expected reward accumulated before the first hit of `targets`, where the
/// chain earns reward[x] per unit time in state x.
///
/// Uses subtraction-free state elimination (a GTH-type reduction), so the
/// result keeps full relative accuracy even when rates span many orders of
/// magnitude. Throws Unreachable when the target set is not hit almost surely.
double expected_reward_until_hit(const SparseGenerator& gen, int source, std::span<const char> targets,
                                 std::span<const double> reward);

/// Expected hitting time of `targets` from `source`; 0 if source is a target.
double mean_hitting_time(const SparseGenerator& gen, int source, std::span<const char> targets);

/// Poisson(lambda) weights truncated to mass >= 1 - tol, as [first, weights).
struct PoissonWeights {
    long first = 0;
    std::vector<double> weights;
};
PoissonWeights poisson_weights(double lambda, double tol);

/// Row vector p0 * exp(Q t) by uniformization with truncation error <= tol.
std::vector<double> transient_distribution(const SparseGenerator& gen, std::span<const double> p0, double t,
                                           double tol = 1e-12);

/// Dense exp(Q t), row-major, by uniformization of a short step followed
/// by repeated squaring. Intended for small chains.
std::vector<double> transition_matrix(const SparseGenerator& gen, double t, double tol = 1e-16);

/// Hitting time of `targets` for a reversible chain, written as the mixture
/// P(T > t) = sum_j w_j exp(-lambda_j t) from the symmetrized transient block.
/// `pi` is the stationary law used for the symmetrization; throws
/// NumericFailure if detailed balance fails and TooLarge beyond 512 states.
class ReversiblePhaseType {
public:
    ReversiblePhaseType(const SparseGenerator& gen, std::span<const double> pi, int source,
                        std::span<const char> targets);

    double survival(double t) const;
    double mean() const;
    /// The t with survival(t) = u, for u in (0, 1].
    double inverse_survival(double u) const;
    const std::vector<double>& rates() const { return rates_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    std::vector<double> rates_, weights_;
};

}  // namespace hcnet
