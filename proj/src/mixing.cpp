#include "hcnet/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hcnet/ctmc.hpp"
#include "hcnet/error.hpp"

namespace hcnet {

namespace {

constexpr int kMaxTvStates = 10000;
constexpr int kMaxDenseStates = 256;

double binomial(int n, int k) { return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)); }

PowerTerm branch_mass_term(const Network& net, int k) {
    const auto f = as_term(net.rate(k));
    PowerTerm sum{0.0, Rational(0)};
    bool first = true;
    for (int l = 1; l <= net.size(k); ++l) {
        PowerTerm t = f.pow(l);
        t.coefficient *= binomial(net.size(k), l);
        sum = first ? t : sum + t;
        first = false;
    }
    return sum;
}

/// Lexicographic comparison of leading terms with a relative tie tolerance.
int compare_terms(const PowerTerm& a, const PowerTerm& b) {
    if (a.exponent != b.exponent) return a.exponent < b.exponent ? -1 : 1;
    const double scale = std::max(std::fabs(a.coefficient), std::fabs(b.coefficient));
    if (std::fabs(a.coefficient - b.coefficient) <= 1e-12 * scale) return 0;
    return a.coefficient < b.coefficient ? -1 : 1;
}

class TvEvaluator {
public:
    TvEvaluator(const Network& net, double nu) : rates_(net, nu), gen_(rates_.generator()), pi_(stationary_star(net, nu)) {
        if (gen_.size() > kMaxTvStates)
            throw Error(ErrorCode::TooLarge, "aggregated space has " + std::to_string(gen_.size()) + " states");
    }

    double operator()(double t) const {
        const int n = gen_.size();
        const auto sz = static_cast<std::size_t>(n);
        if (t <= 0.0) return 1.0 - *std::min_element(pi_.begin(), pi_.end());
        const double tol = 1e-10 / (1.0 + 2.0 * gen_.max_exit_rate() * t);
        double worst = 0.0;
        if (n <= kMaxDenseStates) {
            const auto P = transition_matrix(gen_, t, tol);
            for (std::size_t x = 0; x < sz; ++x) worst = std::max(worst, row_tv(&P[x * sz]));
            return worst;
        }
        std::vector<double> p0(sz, 0.0);
        for (std::size_t x = 0; x < sz; ++x) {
            std::fill(p0.begin(), p0.end(), 0.0);
            p0[x] = 1.0;
            const auto p = transient_distribution(gen_, p0, t, 1e-10);
            worst = std::max(worst, row_tv(p.data()));
        }
        return worst;
    }

    double max_exit_rate() const { return gen_.max_exit_rate(); }

private:
    double row_tv(const double* p) const {
        double s = 0.0;
        for (std::size_t y = 0; y < pi_.size(); ++y) s += std::fabs(p[y] - pi_[y]);
        return 0.5 * s;
    }

    StarRates rates_;
    SparseGenerator gen_;
    std::vector<double> pi_;
};

}  // namespace

ConductanceReport conductance(const Network& net, double nu, std::vector<int> states) {
    const StarRates rates(net, nu);
    const auto& space = rates.space();
    std::sort(states.begin(), states.end());
    states.erase(std::unique(states.begin(), states.end()), states.end());
    if (states.empty()) throw Error(ErrorCode::EmptySubset, "conductance of the empty set");
    if (states.front() < 0 || states.back() >= space.size())
        throw Error(ErrorCode::LevelOutOfRange, "subset refers to a state outside the aggregated space");
    if (static_cast<int>(states.size()) == space.size()) throw Error(ErrorCode::FullSubset, "conductance of the whole space");
    const auto pi = stationary_star(net, nu);
    std::vector<char> in(static_cast<std::size_t>(space.size()), 0);
    for (int s : states) in[static_cast<std::size_t>(s)] = 1;
    const auto gen = rates.generator();
    ConductanceReport rep;
    rep.states = states;
    for (int s : states) {
        rep.mass += pi[static_cast<std::size_t>(s)];
        for (const auto& tr : gen.transitions(s))
            if (!in[static_cast<std::size_t>(tr.to)]) rep.flow += pi[static_cast<std::size_t>(s)] * tr.rate;
    }
    rep.phi = rep.flow / rep.mass;
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < states.size(); ++i) os << (i ? "," : "") << to_string(space.state(states[i]));
    os << '}';
    rep.subset = os.str();
    return rep;
}

ConductanceReport branch_conductance(const Network& net, double nu, int k) {
    if (k < 0 || k >= net.num_components()) throw Error(ErrorCode::LevelOutOfRange, "branch index out of range");
    const StarSpace space(net);
    std::vector<int> states;
    const int L = net.size(k);
    for (int l = 1; l <= L; ++l) states.push_back(space.index({k, l}));
    auto rep = conductance(net, nu, states);
    rep.subset = "B_" + std::to_string(k + 1);
    const auto& f = net.rate(k);
    rep.asymptotic = PowerTerm{L * std::pow(f.coefficient, 1.0 - L), -(f.exponent * Rational(L - 1))};
    return rep;
}

std::vector<double> limiting_branch_mass(const Network& net) {
    PowerTerm total{1.0, Rational(0)};
    std::vector<PowerTerm> terms;
    for (int k = 0; k < net.num_components(); ++k) {
        terms.push_back(branch_mass_term(net, k));
        total = total + terms.back();
    }
    std::vector<double> mass;
    for (const auto& t : terms) mass.push_back(limit_ratio(t, total));
    return mass;
}

int kappa_branch(const Network& net, double r) {
    const auto mass = limiting_branch_mass(net);
    int best = -1;
    PowerTerm best_term;
    for (int k = 0; k < net.num_components(); ++k) {
        if (mass[static_cast<std::size_t>(k)] > r * (1.0 + 1e-12)) continue;
        const auto& f = net.rate(k);
        const int L = net.size(k);
        const PowerTerm escape{std::pow(f.coefficient, L - 1.0) / L, f.exponent * Rational(L - 1)};
        if (best < 0 || compare_terms(escape, best_term) > 0) {
            best = k;
            best_term = escape;
        }
    }
    if (best < 0) {
        std::ostringstream os;
        os << "no branch has limiting stationary mass at most r = " << r;
        throw Error(ErrorCode::NoEligibleBranch, os.str());
    }
    return best;
}

MixingBound mixing_lower_bound(const Network& net, double nu, double r, double epsilon) {
    if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::BadEpsilon, "r must lie in (0, 1)");
    if (!(epsilon > 0.0 && epsilon < 0.5 * (1.0 - r))) throw Error(ErrorCode::BadEpsilon, "epsilon must lie in (0, (1 - r)/2)");
    MixingBound b;
    b.r = r;
    b.epsilon = epsilon;
    b.kappa = kappa_branch(net, r);
    const auto rep = branch_conductance(net, nu, b.kappa);
    b.phi = rep.phi;
    const double c = 1.0 - r - 2.0 * epsilon;
    b.bound = c / rep.phi;
    const auto& f = net.rate(b.kappa);
    const int L = net.size(b.kappa);
    b.asymptotic = PowerTerm{c * std::pow(f.coefficient, L - 1.0) / L, f.exponent * Rational(L - 1)};
    return b;
}

double tv_distance(const Network& net, double nu, double t) {
    if (!(t >= 0.0)) throw Error(ErrorCode::ConfigError, "time must be nonnegative");
    return TvEvaluator(net, nu)(t);
}

double t_mix_exact(const Network& net, double nu, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::BadEpsilon, "epsilon must lie in (0, 1)");
    const TvEvaluator d(net, nu);
    if (d(0.0) <= epsilon) return 0.0;
    double lo = 0.0, hi = 1.0 / d.max_exit_rate();
    int doublings = 0;
    while (d(hi) > epsilon) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 200) throw Error(ErrorCode::NonConvergent, "no bracket for the mixing time");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-6 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (d(mid) > epsilon ? lo : hi) = mid;
    }
    if (hi - lo > 1e-6 * hi) throw Error(ErrorCode::NonConvergent, "mixing-time bisection did not converge");
    return hi;
}

}  // namespace hcnet
