#include "hcnet/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "hcnet/error.hpp"

namespace hcnet {

double PowerLawRate::log_at(double nu) const { return std::log(coefficient) + exponent.to_double() * std::log(nu); }

double PowerLawRate::at(double nu) const { return std::exp(log_at(nu)); }

void PowerLawRate::validate() const {
    if (!(coefficient > 0.0) || !std::isfinite(coefficient))
        throw Error(ErrorCode::ConfigError, "rate coefficient must be positive and finite");
    if (!exponent.is_positive()) throw Error(ErrorCode::ConfigError, "rate exponent must be positive, got " + exponent.str());
}

double PowerTerm::at(double nu) const { return coefficient * std::pow(nu, exponent.to_double()); }

PowerTerm operator+(const PowerTerm& a, const PowerTerm& b) {
    if (a.coefficient == 0.0) return b;
    if (b.coefficient == 0.0) return a;
    if (a.exponent > b.exponent) return a;
    if (b.exponent > a.exponent) return b;
    return {a.coefficient + b.coefficient, a.exponent};
}

PowerTerm operator*(const PowerTerm& a, const PowerTerm& b) {
    return {a.coefficient * b.coefficient, a.exponent + b.exponent};
}

PowerTerm operator/(const PowerTerm& a, const PowerTerm& b) {
    if (b.coefficient == 0.0) throw Error(ErrorCode::NumericFailure, "division by a zero power term");
    return {a.coefficient / b.coefficient, a.exponent - b.exponent};
}

PowerTerm PowerTerm::pow(int n) const { return {std::pow(coefficient, n), exponent * Rational(n)}; }

double limit_ratio(const PowerTerm& a, const PowerTerm& b) {
    if (a.coefficient == 0.0) return 0.0;
    if (b.coefficient == 0.0) return std::numeric_limits<double>::infinity();
    if (a.exponent > b.exponent) return std::numeric_limits<double>::infinity();
    if (a.exponent < b.exponent) return 0.0;
    return a.coefficient / b.coefficient;
}

PowerTerm as_term(const PowerLawRate& rate) { return {rate.coefficient, rate.exponent}; }

const PowerLawRate& Component::user_rate(int user) const {
    if (user_rates.empty()) return rate;
    return user_rates.at(static_cast<std::size_t>(user));
}

namespace {

std::vector<std::uint32_t> local_adjacency(const Component& c) {
    std::vector<std::uint32_t> adj(static_cast<std::size_t>(c.size), 0);
    for (auto [u, v] : c.intra_edges) {
        adj[static_cast<std::size_t>(u)] |= 1u << v;
        adj[static_cast<std::size_t>(v)] |= 1u << u;
    }
    return adj;
}

std::string list_users(const std::vector<int>& users) {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < users.size(); ++i) os << (i ? "," : "") << users[i];
    os << '}';
    return os.str();
}

}  // namespace

std::optional<std::pair<std::vector<int>, std::vector<int>>> find_split(const Component& component) {
    const int n = component.size;
    if (n <= 1 || component.intra_edges.empty()) return std::nullopt;
    if (n > 32) throw Error(ErrorCode::TooLarge, "component with intra edges has more than 32 users");
    // A split exists iff the complement of the conflict graph is disconnected.
    std::vector<std::vector<char>> conflict(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
    for (auto [u, v] : component.intra_edges) {
        conflict[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = 1;
        conflict[static_cast<std::size_t>(v)][static_cast<std::size_t>(u)] = 1;
    }
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int v = 0; v < n; ++v) {
            if (v != u && !seen[static_cast<std::size_t>(v)] && !conflict[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                stack.push_back(v);
            }
        }
    }
    std::vector<int> a, b;
    for (int v = 0; v < n; ++v) (seen[static_cast<std::size_t>(v)] ? a : b).push_back(v);
    if (b.empty()) return std::nullopt;
    return std::make_pair(std::move(a), std::move(b));
}

Network validate_spec(NetworkSpec spec) {
    if (spec.components.empty()) throw Error(ErrorCode::EmptyComponent, "network has no components");
    Network net;
    for (std::size_t k = 0; k < spec.components.size(); ++k) {
        auto& c = spec.components[k];
        const std::string where = "component " + std::to_string(k + 1);
        if (c.size < 1) throw Error(ErrorCode::EmptyComponent, where + " has size " + std::to_string(c.size));
        c.rate.validate();
        if (!c.user_rates.empty()) {
            if (static_cast<int>(c.user_rates.size()) != c.size)
                throw Error(ErrorCode::ConfigError, where + ": user_rates must list one rate per user");
            for (const auto& r : c.user_rates) r.validate();
        }
        for (auto& [u, v] : c.intra_edges) {
            if (u < 0 || v < 0 || u >= c.size || v >= c.size || u == v)
                throw Error(ErrorCode::ConfigError,
                            where + ": invalid intra edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
            if (u > v) std::swap(u, v);
        }
        std::sort(c.intra_edges.begin(), c.intra_edges.end());
        c.intra_edges.erase(std::unique(c.intra_edges.begin(), c.intra_edges.end()), c.intra_edges.end());
        if (auto split = find_split(c))
            throw Error(ErrorCode::NonMinimalComponent, where + " splits into " + list_users(split->first) + " and " +
                                                              list_users(split->second));
        net.sizes_.push_back(c.size);
        net.total_users_ += c.size;
        net.has_intra_ = net.has_intra_ || !c.intra_edges.empty() || !c.user_rates.empty();
    }
    net.spec_ = std::move(spec);
    return net;
}

std::string to_string(const StarState& s) {
    if (s.is_root()) return "0";
    return "(" + std::to_string(s.branch + 1) + "," + std::to_string(s.level) + ")";
}

StarSpace::StarSpace(const Network& net) {
    for (int k = 0; k < net.num_components(); ++k) {
        offsets_.push_back(size_ - 1);
        sizes_.push_back(net.size(k));
        size_ += net.size(k);
    }
}

int StarSpace::index(const StarState& s) const {
    if (s.is_root()) return 0;
    if (s.branch < 0 || s.branch >= static_cast<int>(sizes_.size()))
        throw Error(ErrorCode::LevelOutOfRange, "branch " + std::to_string(s.branch + 1) + " does not exist");
    if (s.level < 1 || s.level > sizes_[static_cast<std::size_t>(s.branch)])
        throw Error(ErrorCode::LevelOutOfRange, "level " + std::to_string(s.level) + " outside branch " +
                                                    std::to_string(s.branch + 1));
    return offsets_[static_cast<std::size_t>(s.branch)] + s.level;
}

StarState StarSpace::state(int index) const {
    if (index == 0) return StarState::root();
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index - 1);
    const int k = static_cast<int>(it - offsets_.begin()) - 1;
    return {k, index - offsets_[static_cast<std::size_t>(k)]};
}

std::vector<int> StarSpace::branch_labels() const {
    std::vector<int> labels(static_cast<std::size_t>(size_), -1);
    for (std::size_t k = 0; k < sizes_.size(); ++k)
        for (int l = 1; l <= sizes_[k]; ++l) labels[static_cast<std::size_t>(offsets_[k] + l)] = static_cast<int>(k);
    return labels;
}

StarRates::StarRates(const Network& net, double nu) : space_(net), nu_(nu) {
    if (net.has_intra_structure())
        throw Error(ErrorCode::AggregationInvalid, "aggregated chain requires components without intra structure");
    if (!(nu > 0.0) || !std::isfinite(nu)) throw Error(ErrorCode::ConfigError, "nu must be positive");
    for (int k = 0; k < net.num_components(); ++k) {
        sizes_.push_back(net.size(k));
        f_.push_back(net.rate(k).at(nu));
    }
}

double StarRates::operator()(const StarState& from, const StarState& to) const {
    space_.index(from);
    space_.index(to);
    if (from.is_root()) {
        if (to.is_root() || to.level != 1) return 0.0;
        return sizes_[static_cast<std::size_t>(to.branch)] * f_[static_cast<std::size_t>(to.branch)];
    }
    if (to.is_root()) return from.level == 1 ? 1.0 : 0.0;
    if (from.branch != to.branch) return 0.0;
    const int L = sizes_[static_cast<std::size_t>(from.branch)];
    if (to.level == from.level + 1) return (L - from.level) * f_[static_cast<std::size_t>(from.branch)];
    if (to.level == from.level - 1) return from.level;
    return 0.0;
}

SparseGenerator StarRates::generator() const {
    SparseGenerator gen(space_.size());
    for (std::size_t k = 0; k < sizes_.size(); ++k) {
        const int kk = static_cast<int>(k);
        const int L = sizes_[k];
        const double f = f_[k];
        gen.add_rate(0, space_.index({kk, 1}), L * f);
        gen.add_rate(space_.index({kk, 1}), 0, 1.0);
        for (int l = 1; l < L; ++l) {
            gen.add_rate(space_.index({kk, l}), space_.index({kk, l + 1}), (L - l) * f);
            gen.add_rate(space_.index({kk, l + 1}), space_.index({kk, l}), l + 1.0);
        }
    }
    return gen;
}

StarRates star_rates(const Network& net, double nu) { return StarRates(net, nu); }

namespace {

double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

std::vector<double> normalise_log(const std::vector<double>& logw) {
    const double m = *std::max_element(logw.begin(), logw.end());
    std::vector<double> p(logw.size());
    double total = 0.0;
    for (std::size_t i = 0; i < logw.size(); ++i) total += (p[i] = std::exp(logw[i] - m));
    for (double& x : p) x /= total;
    return p;
}

}  // namespace

std::vector<double> stationary_star(const Network& net, double nu) {
    const StarRates rates(net, nu);
    const auto& space = rates.space();
    std::vector<double> logw(static_cast<std::size_t>(space.size()), 0.0);
    for (int k = 0; k < net.num_components(); ++k) {
        const double logf = net.rate(k).log_at(nu);
        for (int l = 1; l <= net.size(k); ++l)
            logw[static_cast<std::size_t>(space.index({k, l}))] = log_binomial(net.size(k), l) + l * logf;
    }
    return normalise_log(logw);
}

std::vector<FullState> component_independent_sets(const Component& component) {
    if (component.size > kMaxFullSpaceUsers)
        throw Error(ErrorCode::TooLarge, "component has " + std::to_string(component.size) + " users");
    const auto adj = local_adjacency(component);
    std::vector<FullState> sets;
    const FullState limit = FullState{1} << component.size;
    for (FullState s = 1; s < limit; ++s) {
        bool ok = true;
        for (FullState rest = s; rest && ok; rest &= rest - 1) {
            const int u = std::countr_zero(rest);
            ok = (adj[static_cast<std::size_t>(u)] & s) == 0;
        }
        if (ok) sets.push_back(s);
    }
    return sets;
}

FullSpace enumerate_full_space(const Network& net) {
    if (net.total_users() > kMaxFullSpaceUsers)
        throw Error(ErrorCode::TooLarge, "full space needs " + std::to_string(net.total_users()) + " users, limit " +
                                             std::to_string(kMaxFullSpaceUsers));
    FullSpace fs;
    fs.net_ = &net;
    fs.states_.push_back(0);
    int offset = 0;
    for (int k = 0; k < net.num_components(); ++k) {
        const auto& c = net.component(k);
        fs.offsets_.push_back(offset);
        const auto adj = local_adjacency(c);
        for (int u = 0; u < c.size; ++u) {
            fs.user_component_.push_back(k);
            fs.neighbours_.push_back(adj[static_cast<std::size_t>(u)] << offset);
            fs.user_rates_.push_back(c.user_rate(u));
        }
        for (FullState s : component_independent_sets(c)) fs.states_.push_back(s << offset);
        offset += c.size;
    }
    std::sort(fs.states_.begin(), fs.states_.end());
    return fs;
}

int FullSpace::index(FullState s) const {
    auto it = std::lower_bound(states_.begin(), states_.end(), s);
    if (it == states_.end() || *it != s) throw Error(ErrorCode::LevelOutOfRange, "state is not an independent set");
    return static_cast<int>(it - states_.begin());
}

int FullSpace::component_of_state(FullState s) const {
    if (s == 0) return -1;
    return component_of_user(std::countr_zero(s));
}

FullState FullSpace::full_component(int k) const {
    const int L = net_->size(k);
    return ((FullState{1} << L) - 1) << offsets_.at(static_cast<std::size_t>(k));
}

double FullSpace::activation_rate(FullState s, int user, double nu) const {
    const FullState bit = FullState{1} << user;
    if (s & bit) return 0.0;
    if (s != 0 && component_of_state(s) != component_of_user(user)) return 0.0;
    if (neighbours_[static_cast<std::size_t>(user)] & s) return 0.0;
    return user_rates_[static_cast<std::size_t>(user)].at(nu);
}

SparseGenerator FullSpace::generator(double nu) const {
    SparseGenerator gen(size());
    for (int i = 0; i < size(); ++i) {
        const FullState s = states_[static_cast<std::size_t>(i)];
        for (int u = 0; u < num_users(); ++u) {
            const FullState bit = FullState{1} << u;
            if (s & bit) {
                gen.add_rate(i, index(s & ~bit), 1.0);
            } else if (const double r = activation_rate(s, u, nu); r > 0.0) {
                gen.add_rate(i, index(s | bit), r);
            }
        }
    }
    return gen;
}

std::vector<double> FullSpace::stationary(double nu) const {
    std::vector<double> logw(states_.size(), 0.0);
    std::vector<double> logf(user_rates_.size());
    for (std::size_t u = 0; u < user_rates_.size(); ++u) logf[u] = user_rates_[u].log_at(nu);
    for (std::size_t i = 0; i < states_.size(); ++i)
        for (FullState rest = states_[i]; rest; rest &= rest - 1)
            logw[i] += logf[static_cast<std::size_t>(std::countr_zero(rest))];
    return normalise_log(logw);
}

}  // namespace hcnet
