#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hcnet/ctmc.hpp"
#include "hcnet/rational.hpp"

namespace hcnet {

/// Activation rate f(nu) = coefficient * nu^exponent.
struct PowerLawRate {
    double coefficient = 1.0;
    Rational exponent{1};

    double log_at(double nu) const;
    double at(double nu) const;
    void validate() const;

    friend bool operator==(const PowerLawRate&, const PowerLawRate&) = default;
};

/// Asymptotic monomial coefficient * nu^exponent, the currency of every
/// limit computed in this library.
struct PowerTerm {
    double coefficient = 0.0;
    Rational exponent{0};

    double at(double nu) const;
    /// Leading term of the sum: the larger exponent wins, ties add.
    friend PowerTerm operator+(const PowerTerm& a, const PowerTerm& b);
    friend PowerTerm operator*(const PowerTerm& a, const PowerTerm& b);
    friend PowerTerm operator/(const PowerTerm& a, const PowerTerm& b);
    PowerTerm pow(int n) const;
};

/// lim a(nu)/b(nu) as nu -> infinity; +infinity when a dominates.
double limit_ratio(const PowerTerm& a, const PowerTerm& b);

PowerTerm as_term(const PowerLawRate& rate);

struct Component {
    int size = 1;
    PowerLawRate rate;
    /// Pairs of user indices (0-based, local to the component) that interfere.
    std::vector<std::pair<int, int>> intra_edges;
    /// Optional per-user rates; empty means every user has `rate`.
    std::vector<PowerLawRate> user_rates;

    const PowerLawRate& user_rate(int user) const;
    bool has_user_rates() const { return !user_rates.empty(); }
};

struct NetworkSpec {
    std::vector<Component> components;
};

/// A validated network. Immutable; K and the sizes are cached.
class Network {
public:
    const NetworkSpec& spec() const { return spec_; }
    int num_components() const { return static_cast<int>(sizes_.size()); }
    int size(int k) const { return sizes_.at(static_cast<std::size_t>(k)); }
    const PowerLawRate& rate(int k) const { return spec_.components.at(static_cast<std::size_t>(k)).rate; }
    const Component& component(int k) const { return spec_.components.at(static_cast<std::size_t>(k)); }
    int total_users() const { return total_users_; }
    /// True if any component has intra-component conflicts or per-user rates.
    bool has_intra_structure() const { return has_intra_; }

private:
    friend Network validate_spec(NetworkSpec spec);
    NetworkSpec spec_;
    std::vector<int> sizes_;
    int total_users_ = 0;
    bool has_intra_ = false;
};

/// Checks sizes, rates, edge indices and component minimality.
/// Throws EmptyComponent, NonMinimalComponent or ConfigError.
Network validate_spec(NetworkSpec spec);

/// Returns a bipartition (A, B) of a component's users with every A-B pair
/// interfering, or nullopt when the component is minimal.
std::optional<std::pair<std::vector<int>, std::vector<int>>> find_split(const Component& component);

/// Aggregated state: the root (all inactive) or (branch, level) with
/// 1 <= level <= L_branch. Branches are 0-based.
struct StarState {
    int branch = -1;
    int level = 0;

    static StarState root() { return {}; }
    bool is_root() const { return level == 0; }
    friend bool operator==(const StarState& a, const StarState& b) {
        return a.is_root() ? b.is_root() : (a.branch == b.branch && a.level == b.level);
    }
};

std::string to_string(const StarState& s);

/// Dense indexing of the star-shaped state space: 0 is the root, branch k
/// occupies a contiguous block of L_k indices.
class StarSpace {
public:
    explicit StarSpace(const Network& net);
    int size() const { return size_; }
    int index(const StarState& s) const;
    StarState state(int index) const;
    /// Branch of each state; -1 for the root.
    std::vector<int> branch_labels() const;

private:
    std::vector<int> offsets_;
    std::vector<int> sizes_;
    int size_ = 1;
};

/// Transition rates of the aggregated process at a fixed nu.
class StarRates {
public:
    StarRates(const Network& net, double nu);
    double operator()(const StarState& from, const StarState& to) const;
    double nu() const { return nu_; }
    /// Activation rate f_k(nu) of component k.
    double activation(int k) const { return f_.at(static_cast<std::size_t>(k)); }
    SparseGenerator generator() const;
    const StarSpace& space() const { return space_; }

private:
    std::vector<int> sizes_;
    std::vector<double> f_;
    StarSpace space_;
    double nu_;
};

/// Throws AggregationInvalid when intra-component structure is present.
StarRates star_rates(const Network& net, double nu);

/// Stationary law of the aggregated process, indexed by StarSpace.
std::vector<double> stationary_star(const Network& net, double nu);

/// Bit-vector activity state on the full independent-set space.
using FullState = std::uint32_t;

inline constexpr int kMaxFullSpaceUsers = 24;

/// Full independent-set state space with per-user dynamics.
class FullSpace {
public:
    const std::vector<FullState>& states() const { return states_; }
    int size() const { return static_cast<int>(states_.size()); }
    int index(FullState s) const;
    /// Global user index of (component, local user).
    int user(int k, int local) const { return offsets_.at(static_cast<std::size_t>(k)) + local; }
    int component_of_user(int user) const { return user_component_.at(static_cast<std::size_t>(user)); }
    int num_users() const { return static_cast<int>(user_component_.size()); }
    /// Component whose users are active in s; -1 for the empty state.
    int component_of_state(FullState s) const;
    /// All users of component k active.
    FullState full_component(int k) const;
    /// Rate at which `user` activates in state s (0 when blocked).
    double activation_rate(FullState s, int user, double nu) const;
    /// Generator on the enumerated states at this nu.
    SparseGenerator generator(double nu) const;
    std::vector<double> stationary(double nu) const;

private:
    friend FullSpace enumerate_full_space(const Network& net);
    const Network* net_ = nullptr;
    std::vector<FullState> states_;
    std::vector<int> offsets_;
    std::vector<int> user_component_;
    std::vector<FullState> neighbours_;
    std::vector<PowerLawRate> user_rates_;
};

/// Throws TooLarge when the network has more than kMaxFullSpaceUsers users.
/// The returned space refers to `net`, which must outlive it.
FullSpace enumerate_full_space(const Network& net);

/// All nonempty independent sets of a single component, as local bitmasks.
std::vector<FullState> component_independent_sets(const Component& component);

}  // namespace hcnet
