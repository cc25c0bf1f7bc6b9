#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "hcnet/asymptotics.hpp"
#include "hcnet/bd.hpp"
#include "hcnet/ctmc.hpp"
#include "hcnet/model.hpp"
#include "hcnet/stats.hpp"

namespace hcnet {

struct SimOptions {
    double nu = 1.0;
    std::int64_t replications = 1000;
    std::uint64_t seed = 0;
    /// Replications still running at this time are censored.
    double horizon = std::numeric_limits<double>::infinity();
    /// Worker threads; 0 means all hardware threads. Results do not depend on it.
    int workers = 1;
    /// Sample escapes from the top of a branch as sums of exponentials with
    /// the branch eigenvalues instead of walking them step by step.
    bool accelerated = true;
};

struct SimReport {
    std::vector<double> samples;
    /// Time spent in each branch, row-major (replication, branch).
    std::vector<double> branch_time;
    int num_branches = 0;
    std::int64_t censored = 0;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;

    double censored_fraction() const {
        return samples.empty() ? 0.0 : static_cast<double>(censored) / static_cast<double>(samples.size());
    }
};

/// Runs body(i) for i in [0, n) on `workers` threads; body must only write
/// to slot i of its outputs.
void parallel_for(std::int64_t n, int workers, const std::function<void(std::int64_t)>& body);

/// Transition time (k1,l1) -> (k2,l2) on the aggregated chain.
SimReport sample_transition(const Network& net, StarState source, StarState target, const SimOptions& opt);

/// Hitting time of `target` on an arbitrary chain, by the plain jump chain.
/// `labels` maps states to a branch index (or -1) for the time accumulators.
SimReport sample_hitting(const SparseGenerator& gen, int source, const std::vector<char>& targets,
                         const std::vector<int>& labels, int num_branches, const SimOptions& opt);

/// Transition time between two states of the full independent-set chain.
SimReport sample_transition_full(const FullSpace& space, FullState source, FullState target, const SimOptions& opt);

/// Total time in B_k over total transition time, pooled over replications, k != k2.
std::vector<double> branch_occupancy_fractions(const SimReport& report, const BranchClassification& c);

struct OccupancyTriple {
    double tau = 0.0;      // time in (k, L_k)
    double R = 0.0;        // time before first leaving B_k
    double tau_res = 0.0;  // time in (k, L_k) before first leaving B_k
};

struct OccupancyReport {
    double t = 0.0;
    std::vector<OccupancyTriple> paths;
    OccupancyTriple mean;
    /// Fraction of paths with tau >= (1 - delta) t.
    double saturated_fraction = 0.0;
    Interval saturated_ci;
    /// Paths violating tau_res <= min(tau, R) <= t.
    std::int64_t violations = 0;
};

/// Occupancy functionals over [0, t] from `source` in branch k.
OccupancyReport occupancy_functionals(const Network& net, double nu, StarState source, double t, double delta,
                                      std::int64_t replications, std::uint64_t seed, int workers = 1);

struct ResidualRatio {
    double mean_tau_res = 0.0;  // E tau_res[0, inf] by simulation
    double mean_escape = 0.0;   // E T_{(k,l),0} by simulation
    double ratio = 0.0;
    double exact_ratio = 0.0;   // from the reward oracle
};

ResidualRatio residual_ratio(const Network& net, double nu, StarState source, std::int64_t replications,
                             std::uint64_t seed, int workers = 1);

struct StarvationEstimate {
    double t = 0.0;
    double probability = 1.0;  // P(tau_{k2}(t) = 0)
    Interval ci;
    std::int64_t replications = 0;
};

/// Fraction of replications that have not entered B_{k2} by time t.
StarvationEstimate estimate_starvation(const Network& net, double nu, int k2, double t, std::int64_t replications,
                                       std::uint64_t seed, StarState source, int workers = 1);

/// Same estimate for several t at once, reusing one set of entry times.
std::vector<StarvationEstimate> estimate_starvation(const Network& net, double nu, int k2,
                                                    const std::vector<double>& times, std::int64_t replications,
                                                    std::uint64_t seed, StarState source, int workers = 1);

struct GeometricSumPoint {
    double nu = 0.0;
    double ks = 0.0;
    double mean_visits = 0.0;
    double ks_visits = 0.0;  // N_k / E N_k against Exp(1)
};

/// Compounds a geometric number of visits to a strongly attracting branch.
/// Throws WrongScenario if k is not strongly attracting for (k1, k2).
std::vector<GeometricSumPoint> geometric_sum_limit_check(const Network& net, int k1, int k2, int k,
                                                         const std::vector<double>& nu_grid, std::int64_t draws,
                                                         std::uint64_t seed, int workers = 1);

/// Exact E T between two aggregated states, by the elimination oracle.
double exact_mean_transition(const Network& net, double nu, StarState source, StarState target);

/// Samples T_{start,0} on a single birth-and-death branch (accelerated).
std::vector<double> sample_escape(const BDBranch& branch, double nu, int start, std::int64_t n,
                                  std::uint64_t seed, int workers = 1);

/// Samples the time from `source` to the empty state on the full
/// independent-set chain. The accelerated path inverts the exact phase-type
/// survival function; otherwise the jump chain is walked.
std::vector<double> sample_escape_full(const FullSpace& space, double nu, FullState source, std::int64_t n,
                                       std::uint64_t seed, bool accelerated = true, int workers = 1);

}  // namespace hcnet
