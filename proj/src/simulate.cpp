#include "hcnet/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "hcnet/error.hpp"
#include "hcnet/rng.hpp"

namespace hcnet {

void parallel_for(std::int64_t n, int workers, const std::function<void(std::int64_t)>& body) {
    if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = static_cast<int>(std::min<std::int64_t>(workers, std::max<std::int64_t>(n, 1)));
    if (workers == 1) {
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
    constexpr std::int64_t kChunk = 64;
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto run = [&] {
        try {
            for (;;) {
                const std::int64_t start = next.fetch_add(kChunk);
                if (start >= n || failed.load()) return;
                const std::int64_t stop = std::min(n, start + kChunk);
                for (std::int64_t i = start; i < stop; ++i) body(i);
            }
        } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

/// One birth-and-death branch: up[l], down[l] for l = 0..L, optional spectrum.
struct BranchDynamics {
    int L = 1;
    std::vector<double> up, down;
    std::vector<double> theta;

    BranchDynamics(const BDBranch& b, double nu, bool accelerated) : L(b.L), up(b.L + 1, 0.0), down(b.L + 1, 0.0) {
        const double f = b.rate.at(nu);
        for (int l = 1; l <= L; ++l) {
            down[l] = b.d(l);
            if (l < L) up[l] = b.a(l) * f;
        }
        if (accelerated) {
            try {
                theta = escape_spectrum(b, nu).eigenvalues;
            } catch (const Error&) {
                theta.clear();  // walk the branch instead
            }
        }
    }

    int step(Rng& rng, int l, double& t) const {
        const double total = up[l] + down[l];
        t += rng.exponential(total);
        return rng.uniform() * total < up[l] ? l + 1 : l - 1;
    }

    /// Time to reach level 0 from level l.
    double escape(Rng& rng, int l) const {
        double t = 0.0;
        while (l > 0) {
            if (l == L && !theta.empty()) {
                for (double th : theta) t += rng.exponential(th);
                return t;
            }
            l = step(rng, l, t);
        }
        return t;
    }

    /// Walks from l until level `stop` or 0; returns the level reached.
    int walk_until(Rng& rng, int l, int stop, double& t) const {
        while (l != stop && l != 0) l = step(rng, l, t);
        return l;
    }
};

class StarSampler {
public:
    StarSampler(const Network& net, double nu, bool accelerated) {
        const StarRates rates(net, nu);  // validates aggregation
        double total = 0.0;
        for (int k = 0; k < net.num_components(); ++k) {
            branches_.emplace_back(BDBranch::standard(net.size(k), net.rate(k)), nu, accelerated);
            total += net.size(k) * rates.activation(k);
            cumulative_.push_back(total);
        }
        root_rate_ = total;
        for (double& c : cumulative_) c /= total;
    }

    int num_branches() const { return static_cast<int>(branches_.size()); }

    /// Returns false when the horizon is exceeded.
    bool run(Rng& rng, StarState state, const StarState& target, double horizon, double& t, double* branch_time) const {
        t = 0.0;
        if (state == target) return true;
        for (;;) {
            if (state.is_root()) {
                t += rng.exponential(root_rate_);
                const double u = rng.uniform();
                int k = 0;
                while (k + 1 < num_branches() && u > cumulative_[static_cast<std::size_t>(k)]) ++k;
                state = {k, 1};
            }
            if (t > horizon) return false;
            const auto& b = branches_[static_cast<std::size_t>(state.branch)];
            double dt = 0.0;
            if (!target.is_root() && state.branch == target.branch) {
                const int reached = b.walk_until(rng, state.level, target.level, dt);
                t += dt;
                branch_time[state.branch] += dt;
                if (reached == target.level) return t <= horizon;
            } else {
                dt = b.escape(rng, state.level);
                t += dt;
                branch_time[state.branch] += dt;
                if (target.is_root()) return t <= horizon;
            }
            state = StarState::root();
            if (t > horizon) return false;
        }
    }

private:
    std::vector<BranchDynamics> branches_;
    std::vector<double> cumulative_;
    double root_rate_ = 0.0;
};

/// Flattened jump chain for arbitrary sparse generators.
class JumpChain {
public:
    explicit JumpChain(const SparseGenerator& gen) : exit_(static_cast<std::size_t>(gen.size())), first_(1, 0) {
        for (int x = 0; x < gen.size(); ++x) {
            double total = 0.0;
            for (const auto& tr : gen.transitions(x)) total += tr.rate;
            exit_[static_cast<std::size_t>(x)] = total;
            double acc = 0.0;
            for (const auto& tr : gen.transitions(x)) {
                acc += tr.rate;
                to_.push_back(tr.to);
                cum_.push_back(acc / total);
            }
            first_.push_back(static_cast<int>(to_.size()));
        }
    }

    double exit_rate(int x) const { return exit_[static_cast<std::size_t>(x)]; }

    int jump(Rng& rng, int x) const {
        const double u = rng.uniform();
        int i = first_[static_cast<std::size_t>(x)];
        const int last = first_[static_cast<std::size_t>(x) + 1] - 1;
        while (i < last && u > cum_[static_cast<std::size_t>(i)]) ++i;
        return to_[static_cast<std::size_t>(i)];
    }

private:
    std::vector<double> exit_;
    std::vector<int> first_;
    std::vector<int> to_;
    std::vector<double> cum_;
};

SimReport make_report(const SimOptions& opt, int K) {
    if (opt.replications < 1) throw Error(ErrorCode::ConfigError, "replications must be positive");
    SimReport r;
    r.samples.assign(static_cast<std::size_t>(opt.replications), 0.0);
    r.branch_time.assign(static_cast<std::size_t>(opt.replications * K), 0.0);
    r.num_branches = K;
    r.seed = opt.seed;
    return r;
}

}  // namespace

SimReport sample_transition(const Network& net, StarState source, StarState target, const SimOptions& opt) {
    const auto start = Clock::now();
    const StarSpace space(net);
    space.index(source);
    space.index(target);
    const int K = net.num_components();
    SimReport report = make_report(opt, K);
    if (!opt.accelerated) {
        const StarRates rates(net, opt.nu);
        std::vector<char> targets(static_cast<std::size_t>(space.size()), 0);
        targets[static_cast<std::size_t>(space.index(target))] = 1;
        report = sample_hitting(rates.generator(), space.index(source), targets, space.branch_labels(), K, opt);
        report.wall_seconds = seconds_since(start);
        return report;
    }
    const StarSampler sampler(net, opt.nu, true);
    std::vector<char> censored(static_cast<std::size_t>(opt.replications), 0);
    parallel_for(opt.replications, opt.workers, [&](std::int64_t i) {
        Rng rng(opt.seed, static_cast<std::uint64_t>(i));
        double t = 0.0;
        const bool ok = sampler.run(rng, source, target, opt.horizon, t, report.branch_time.data() + i * K);
        report.samples[static_cast<std::size_t>(i)] = ok ? t : opt.horizon;
        censored[static_cast<std::size_t>(i)] = !ok;
    });
    report.censored = std::count(censored.begin(), censored.end(), 1);
    report.wall_seconds = seconds_since(start);
    return report;
}

SimReport sample_hitting(const SparseGenerator& gen, int source, const std::vector<char>& targets,
                         const std::vector<int>& labels, int num_branches, const SimOptions& opt) {
    const auto start = Clock::now();
    const int K = num_branches;
    SimReport report = make_report(opt, K);
    const JumpChain chain(gen);
    std::vector<char> censored(static_cast<std::size_t>(opt.replications), 0);
    parallel_for(opt.replications, opt.workers, [&](std::int64_t i) {
        Rng rng(opt.seed, static_cast<std::uint64_t>(i));
        double t = 0.0;
        double* bt = report.branch_time.data() + i * K;
        int x = source;
        bool ok = true;
        while (!targets[static_cast<std::size_t>(x)]) {
            const double rate = chain.exit_rate(x);
            if (!(rate > 0.0)) throw Error(ErrorCode::Unreachable, "absorbed outside the target set");
            const double dt = rng.exponential(rate);
            t += dt;
            if (labels[static_cast<std::size_t>(x)] >= 0) bt[labels[static_cast<std::size_t>(x)]] += dt;
            if (t > opt.horizon) {
                ok = false;
                break;
            }
            x = chain.jump(rng, x);
        }
        report.samples[static_cast<std::size_t>(i)] = ok ? t : opt.horizon;
        censored[static_cast<std::size_t>(i)] = !ok;
    });
    report.censored = std::count(censored.begin(), censored.end(), 1);
    report.wall_seconds = seconds_since(start);
    return report;
}

SimReport sample_transition_full(const FullSpace& space, FullState source, FullState target, const SimOptions& opt) {
    const auto gen = space.generator(opt.nu);
    std::vector<char> targets(static_cast<std::size_t>(space.size()), 0);
    targets[static_cast<std::size_t>(space.index(target))] = 1;
    std::vector<int> labels;
    int K = 0;
    for (FullState s : space.states()) {
        labels.push_back(space.component_of_state(s));
        K = std::max(K, labels.back() + 1);
    }
    if (space.num_users() > 0) K = std::max(K, space.component_of_user(space.num_users() - 1) + 1);
    return sample_hitting(gen, space.index(source), targets, labels, K, opt);
}

std::vector<double> branch_occupancy_fractions(const SimReport& report, const BranchClassification& c) {
    const int K = report.num_branches;
    std::vector<double> frac(static_cast<std::size_t>(K), 0.0);
    const auto n = static_cast<std::int64_t>(report.samples.size());
    double total = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
        total += report.samples[static_cast<std::size_t>(i)];
        for (int k = 0; k < K; ++k)
            if (k != c.k2) frac[static_cast<std::size_t>(k)] += report.branch_time[static_cast<std::size_t>(i * K + k)];
    }
    if (total > 0.0)
        for (double& f : frac) f /= total;
    return frac;
}

OccupancyReport occupancy_functionals(const Network& net, double nu, StarState source, double t, double delta,
                                      std::int64_t replications, std::uint64_t seed, int workers) {
    if (source.is_root()) throw Error(ErrorCode::LevelOutOfRange, "occupancy source must lie in a branch");
    if (replications < 1) throw Error(ErrorCode::ConfigError, "replications must be positive");
    const StarRates rates(net, nu);
    const auto& space = rates.space();
    const int src = space.index(source);
    const int top = space.index({source.branch, net.size(source.branch)});
    const auto labels = space.branch_labels();
    const JumpChain chain(rates.generator());
    OccupancyReport rep;
    rep.t = t;
    rep.paths.resize(static_cast<std::size_t>(replications));
    parallel_for(replications, workers, [&](std::int64_t i) {
        Rng rng(seed, static_cast<std::uint64_t>(i));
        OccupancyTriple o;
        double now = 0.0;
        bool inside = true;
        int x = src;
        while (now < t) {
            const double dt = std::min(rng.exponential(chain.exit_rate(x)), t - now);
            if (x == top) {
                o.tau += dt;
                if (inside) o.tau_res += dt;
            }
            if (inside) o.R += dt;
            now += dt;
            if (now >= t) break;
            x = chain.jump(rng, x);
            if (labels[static_cast<std::size_t>(x)] != source.branch) inside = false;
        }
        rep.paths[static_cast<std::size_t>(i)] = o;
    });
    long saturated = 0;
    for (const auto& o : rep.paths) {
        rep.mean.tau += o.tau;
        rep.mean.R += o.R;
        rep.mean.tau_res += o.tau_res;
        if (o.tau >= (1.0 - delta) * t) ++saturated;
        const double slack = 1e-9 * std::max(t, 1.0);
        if (o.tau_res > std::min(o.tau, o.R) + slack || std::min(o.tau, o.R) > t + slack) ++rep.violations;
    }
    const double n = static_cast<double>(replications);
    rep.mean.tau /= n;
    rep.mean.R /= n;
    rep.mean.tau_res /= n;
    rep.saturated_fraction = static_cast<double>(saturated) / n;
    rep.saturated_ci = wilson_interval(saturated, static_cast<long>(replications));
    return rep;
}

ResidualRatio residual_ratio(const Network& net, double nu, StarState source, std::int64_t replications,
                             std::uint64_t seed, int workers) {
    if (source.is_root()) throw Error(ErrorCode::LevelOutOfRange, "source must lie in a branch");
    const int k = source.branch;
    const auto branch = BDBranch::standard(net.size(k), net.rate(k));
    const BranchDynamics dyn(branch, nu, false);
    std::vector<double> res(static_cast<std::size_t>(replications)), esc(static_cast<std::size_t>(replications));
    parallel_for(replications, workers, [&](std::int64_t i) {
        Rng rng(seed, static_cast<std::uint64_t>(i));
        double t = 0.0, at_top = 0.0;
        int l = source.level;
        while (l > 0) {
            const double before = t;
            const int next = dyn.step(rng, l, t);
            if (l == dyn.L) at_top += t - before;
            l = next;
        }
        res[static_cast<std::size_t>(i)] = at_top;
        esc[static_cast<std::size_t>(i)] = t;
    });
    ResidualRatio r;
    for (std::int64_t i = 0; i < replications; ++i) {
        r.mean_tau_res += res[static_cast<std::size_t>(i)];
        r.mean_escape += esc[static_cast<std::size_t>(i)];
    }
    r.mean_tau_res /= static_cast<double>(replications);
    r.mean_escape /= static_cast<double>(replications);
    r.ratio = r.mean_tau_res / r.mean_escape;
    const auto gen = branch_generator(branch, nu);
    std::vector<char> targets(static_cast<std::size_t>(branch.L + 1), 0);
    targets[0] = 1;
    std::vector<double> reward(static_cast<std::size_t>(branch.L + 1), 0.0);
    reward[static_cast<std::size_t>(branch.L)] = 1.0;
    r.exact_ratio = expected_reward_until_hit(gen, source.level, targets, reward) / mean_hitting(branch, source.level, 0, nu);
    return r;
}

std::vector<StarvationEstimate> estimate_starvation(const Network& net, double nu, int k2,
                                                    const std::vector<double>& times, std::int64_t replications,
                                                    std::uint64_t seed, StarState source, int workers) {
    if (!source.is_root() && source.branch == k2)
        throw Error(ErrorCode::SameBranch, "starvation source must lie outside the target branch");
    SimOptions opt;
    opt.nu = nu;
    opt.replications = replications;
    opt.seed = seed;
    opt.workers = workers;
    double tmax = 0.0;
    for (double t : times) tmax = std::max(tmax, t);
    opt.horizon = std::nextafter(tmax, std::numeric_limits<double>::infinity());
    const auto rep = sample_transition(net, source, {k2, 1}, opt);
    std::vector<StarvationEstimate> out;
    for (double t : times) {
        StarvationEstimate e;
        e.t = t;
        e.replications = replications;
        long starving = 0;
        for (double x : rep.samples)
            if (x > t) ++starving;
        e.probability = static_cast<double>(starving) / static_cast<double>(replications);
        e.ci = wilson_interval(starving, static_cast<long>(replications));
        out.push_back(e);
    }
    return out;
}

StarvationEstimate estimate_starvation(const Network& net, double nu, int k2, double t, std::int64_t replications,
                                       std::uint64_t seed, StarState source, int workers) {
    return estimate_starvation(net, nu, k2, std::vector<double>{t}, replications, seed, source, workers).front();
}

std::vector<GeometricSumPoint> geometric_sum_limit_check(const Network& net, int k1, int k2, int k,
                                                         const std::vector<double>& nu_grid, std::int64_t draws,
                                                         std::uint64_t seed, int workers) {
    const auto c = classify(net, k1, net.size(k1), k2, 1);
    if (std::find(c.S.begin(), c.S.end(), k) == c.S.end())
        throw Error(ErrorCode::WrongScenario, "branch " + std::to_string(k + 1) + " is not strongly attracting");
    const auto branch = BDBranch::standard(net.size(k), net.rate(k));
    std::vector<GeometricSumPoint> out;
    for (double nu : nu_grid) {
        const BranchDynamics dyn(branch, nu, true);
        const double wk = net.size(k) * net.rate(k).at(nu);
        const double w2 = net.size(k2) * net.rate(k2).at(nu);
        const double q = w2 / (w2 + wk);
        const double mean_n = (1.0 - q) / q;
        const double mean_s = mean_n * mean_hitting(branch, 1, 0, nu);
        std::vector<double> s(static_cast<std::size_t>(draws)), n(static_cast<std::size_t>(draws));
        parallel_for(draws, workers, [&](std::int64_t i) {
            Rng rng(seed, static_cast<std::uint64_t>(i));
            const std::int64_t visits = rng.geometric(q);
            double total = 0.0;
            for (std::int64_t v = 0; v < visits; ++v) total += dyn.escape(rng, 1);
            s[static_cast<std::size_t>(i)] = total / mean_s;
            n[static_cast<std::size_t>(i)] = static_cast<double>(visits) / mean_n;
        });
        auto exp1 = [](double x) { return -std::expm1(-x); };
        GeometricSumPoint p;
        p.nu = nu;
        p.mean_visits = mean_n;
        p.ks = ks_statistic(s, exp1);
        p.ks_visits = ks_statistic(n, exp1);
        out.push_back(p);
    }
    return out;
}

double exact_mean_transition(const Network& net, double nu, StarState source, StarState target) {
    const StarRates rates(net, nu);
    const auto& space = rates.space();
    std::vector<char> targets(static_cast<std::size_t>(space.size()), 0);
    targets[static_cast<std::size_t>(space.index(target))] = 1;
    return mean_hitting_time(rates.generator(), space.index(source), targets);
}

std::vector<double> sample_escape(const BDBranch& branch, double nu, int start, std::int64_t n, std::uint64_t seed,
                                  int workers) {
    branch.validate();
    if (start < 1 || start > branch.L) throw Error(ErrorCode::LevelOutOfRange, "start level outside the branch");
    const BranchDynamics dyn(branch, nu, true);
    std::vector<double> out(static_cast<std::size_t>(n));
    parallel_for(n, workers, [&](std::int64_t i) {
        Rng rng(seed, static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] = dyn.escape(rng, start);
    });
    return out;
}

std::vector<double> sample_escape_full(const FullSpace& space, double nu, FullState source, std::int64_t n,
                                       std::uint64_t seed, bool accelerated, int workers) {
    const auto gen = space.generator(nu);
    std::vector<char> targets(static_cast<std::size_t>(space.size()), 0);
    targets[static_cast<std::size_t>(space.index(FullState{0}))] = 1;
    const int src = space.index(source);
    std::vector<double> out(static_cast<std::size_t>(n));
    if (accelerated) {
        const auto pi = space.stationary(nu);
        const ReversiblePhaseType law(gen, pi, src, targets);
        parallel_for(n, workers, [&](std::int64_t i) {
            Rng rng(seed, static_cast<std::uint64_t>(i));
            out[static_cast<std::size_t>(i)] = law.inverse_survival(rng.uniform());
        });
        return out;
    }
    SimOptions opt;
    opt.nu = nu;
    opt.replications = n;
    opt.seed = seed;
    opt.workers = workers;
    out = sample_hitting(gen, src, targets, std::vector<int>(static_cast<std::size_t>(space.size()), -1), 0, opt).samples;
    return out;
}

}  // namespace hcnet
