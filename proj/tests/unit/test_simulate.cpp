#include <cmath>
#include <cstring>

#include "doctest.h"
#include "hcnet/asymptotics.hpp"
#include "hcnet/config.hpp"
#include "hcnet/error.hpp"
#include "hcnet/simulate.hpp"
#include "hcnet/stats.hpp"
#include "oracles.hpp"

using namespace hcnet;

namespace {

PowerLawRate lin() { return {1.0, Rational(1)}; }

Network make(std::vector<int> L, std::vector<Rational> a) {
    NetworkSpec spec;
    for (std::size_t i = 0; i < L.size(); ++i) spec.components.push_back({L[i], {1.0, a[i]}, {}, {}});
    return validate_spec(spec);
}

RunConfig preset(const std::string& name) { return load_config(std::string(HCNET_PRESET_DIR) + "/" + name + ".json"); }

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("simulation output does not depend on the worker count") {
    const auto net = make({2, 3, 2}, {Rational(1), Rational(1, 2), Rational(3, 2)});
    for (bool accelerated : {true, false}) {
        SimOptions opt;
        opt.nu = 6.0;
        opt.replications = 3000;
        opt.seed = 77;
        opt.accelerated = accelerated;
        opt.workers = 1;
        const auto a = sample_transition(net, {0, 2}, {2, 2}, opt);
        opt.workers = 4;
        const auto b = sample_transition(net, {0, 2}, {2, 2}, opt);
        opt.workers = 0;
        const auto c = sample_transition(net, {0, 2}, {2, 2}, opt);
        CHECK(same_bits(a.samples, b.samples));
        CHECK(same_bits(a.samples, c.samples));
        CHECK(same_bits(a.branch_time, b.branch_time));
        opt.seed = 78;
        CHECK_FALSE(same_bits(a.samples, sample_transition(net, {0, 2}, {2, 2}, opt).samples));
    }
}

TEST_CASE("simulated means agree with the exact oracle") {
    const std::vector<Network> nets{make({2, 2}, {Rational(1), Rational(1)}),
                                    make({3, 2, 2}, {Rational(1, 2), Rational(1), Rational(3, 4)})};
    for (const auto& net : nets)
        for (double nu : {1.0, 10.0, 150.0})
            for (bool accelerated : {true, false}) {
                if (!accelerated && nu > 10.0) continue;
                SimOptions opt;
                opt.nu = nu;
                opt.replications = 100000;
                opt.seed = 5;
                opt.workers = 0;
                opt.accelerated = accelerated;
                const StarState s{0, net.size(0)}, t{1, net.size(1)};
                const auto rep = sample_transition(net, s, t, opt);
                const auto sum = summarize(rep.samples);
                const StarRates rates(net, nu);
                std::vector<char> targets(static_cast<std::size_t>(rates.space().size()), 0);
                targets[static_cast<std::size_t>(rates.space().index(t))] = 1;
                const double exact = oracle::mean_hitting(rates.generator(), rates.space().index(s), targets);
                CHECK(exact_mean_transition(net, nu, s, t) == doctest::Approx(exact).epsilon(1e-10));
                CHECK(std::fabs(sum.mean - exact) < 4.0 * sum.standard_error);
                CHECK(rep.censored == 0);
            }
}

TEST_CASE("identical endpoints give zero transition times") {
    const auto net = make({2, 2}, {Rational(1), Rational(1)});
    SimOptions opt;
    opt.replications = 10;
    const auto rep = sample_transition(net, {1, 2}, {1, 2}, opt);
    for (double x : rep.samples) CHECK(x == 0.0);
}

TEST_CASE("censoring is reported rather than fatal") {
    const auto net = make({3, 3}, {Rational(1), Rational(1)});
    SimOptions opt;
    opt.nu = 50.0;
    opt.replications = 200;
    opt.horizon = 1.0;
    const auto rep = sample_transition(net, {0, 3}, {1, 3}, opt);
    CHECK(rep.censored > 0);
    CHECK(rep.censored_fraction() > 0.5);
}

TEST_CASE("branch occupancy fractions follow the stationary shares") {
    {
        const auto cfg = preset("case3");
        const auto net = validate_spec(cfg.network);
        const auto c = classify(net, 0, 3, 2, 3);
        SimOptions opt;
        opt.nu = 150.0;
        opt.replications = 5000;
        const auto rep = sample_transition(net, {0, 3}, {2, 3}, opt);
        CHECK(branch_occupancy_fractions(rep, c)[0] >= 0.95);
    }
    {
        const auto cfg = preset("case1b");
        const auto net = validate_spec(cfg.network);
        const auto c = classify(net, 0, 3, 2, 5);
        SimOptions opt;
        opt.nu = 150.0;
        opt.replications = 5000;
        const auto rep = sample_transition(net, {0, 3}, {2, 5}, opt);
        CHECK(std::fabs(branch_occupancy_fractions(rep, c)[1] - c.gamma[1]) <= 0.05);
    }
    {
        const auto net = make({2, 3}, {Rational(1), Rational(1)});
        const auto c = classify(net, 0, 2, 1, 3);
        SimOptions opt;
        opt.nu = 10.0;
        opt.replications = 2000;
        const auto rep = sample_transition(net, {0, 2}, {1, 3}, opt);
        const auto f = branch_occupancy_fractions(rep, c);
        CHECK(f[0] > 0.5);
        CHECK(f[0] <= 1.0);
    }
}

TEST_CASE("full-space and aggregated samples have the same law") {
    const auto net = make({2, 2}, {Rational(1), Rational(1, 2)});
    const auto full = enumerate_full_space(net);
    SimOptions opt;
    opt.nu = 5.0;
    opt.replications = 40000;
    opt.seed = 3;
    const auto star = sample_transition(net, {0, 2}, {1, 2}, opt);
    opt.seed = 4;
    const auto f = sample_transition_full(full, 0b0011, 0b1100, opt);
    CHECK(ks_two_sample(star.samples, f.samples) < 0.015);
}

TEST_CASE("occupancy functionals satisfy the pathwise ordering") {
    NetworkSpec spec;
    spec.components = {{3, lin(), {}, {}}};
    const auto net = validate_spec(spec);
    const double et = exact_mean_transition(net, 100.0, {0, 3}, StarState::root());
    const auto rep = occupancy_functionals(net, 100.0, {0, 3}, 0.5 * et, 0.1, 2000, 9);
    CHECK(rep.violations == 0);
    for (const auto& p : rep.paths) {
        CHECK(p.tau_res <= std::min(p.tau, p.R) + 1e-12);
        CHECK(std::min(p.tau, p.R) <= rep.t + 1e-12);
    }
    CHECK(rep.saturated_fraction >= std::exp(-0.5) - 0.05);
    CHECK(rep.saturated_ci.lower <= rep.saturated_fraction);
    CHECK(rep.saturated_ci.upper >= rep.saturated_fraction - 1e-12);

    const auto ratio = residual_ratio(net, 100.0, {0, 3}, 2000, 10);
    CHECK(ratio.exact_ratio > 0.9);
    CHECK(ratio.exact_ratio <= 1.0);
    CHECK(std::fabs(ratio.ratio - ratio.exact_ratio) < 0.02);
}

TEST_CASE("starvation estimates") {
    const auto cfg = preset("case3");
    const auto net = validate_spec(cfg.network);
    const auto zero = estimate_starvation(net, 150.0, 2, 0.0, 500, 1, {0, 3});
    CHECK(zero.probability == 1.0);
    const double et = exact_mean_transition(net, 150.0, {0, 3}, {2, 1});
    const auto est = estimate_starvation(net, 150.0, 2, std::vector<double>{0.5 * et, 100 * et}, 4000, 2, {0, 3});
    CHECK(est[0].probability >= std::exp(-0.5) - 0.05);
    CHECK(est[1].probability <= 0.01);
    CHECK(est[0].ci.lower <= est[0].probability);
    CHECK(est[0].ci.upper >= est[0].probability);
}

TEST_CASE("geometric sums of visits approach the exponential law") {
    const auto cfg = preset("case2c");
    const auto net = validate_spec(cfg.network);
    const auto c = classify(net, 0, net.size(0), 2, 1);
    REQUIRE_FALSE(c.S.empty());
    const int k = c.S.front();
    const auto pts = geometric_sum_limit_check(net, 0, 2, k, {10.0, 1e4}, 100000, 4);
    REQUIRE(pts.size() == 2);
    CHECK(pts[1].ks <= 0.03);
    CHECK(pts[0].ks > pts[1].ks);
    if (pts[1].mean_visits >= 100) CHECK(pts[1].ks_visits <= 0.02);
    CHECK_THROWS_AS(geometric_sum_limit_check(net, 0, 2, 0, {10.0}, 10, 0), Error);
}

TEST_CASE("escape sampling on a branch matches the exact law") {
    const auto b = BDBranch::standard(3, lin());
    const auto samples = sample_escape(b, 20.0, 3, 50000, 6);
    const EscapeLaw law(b, 20.0, 3);
    CHECK(ks_statistic(samples, [&](double t) { return 1.0 - law.survival(t); }) < 0.01);
}

TEST_CASE("full-space escape: phase-type inversion matches the plain walk") {
    NetworkSpec spec;
    spec.components.push_back({3, lin(), {{0, 1}}, {}});
    const auto net = validate_spec(spec);
    const auto space = enumerate_full_space(net);
    const auto fast = sample_escape_full(space, 8.0, 0b101, 40000, 1, true);
    const auto slow = sample_escape_full(space, 8.0, 0b101, 40000, 2, false);
    CHECK(ks_two_sample(fast, slow) < 0.015);
    std::vector<char> targets(static_cast<std::size_t>(space.size()), 0);
    targets[static_cast<std::size_t>(space.index(0))] = 1;
    const double exact = mean_hitting_time(space.generator(8.0), space.index(0b101), targets);
    const auto s = summarize(fast);
    CHECK(std::fabs(s.mean - exact) < 4 * s.standard_error);
}

TEST_CASE("parallel_for visits every index once") {
    std::vector<int> hits(1000, 0);
    parallel_for(1000, 4, [&](std::int64_t i) { hits[static_cast<std::size_t>(i)] += 1; });
    for (int h : hits) CHECK(h == 1);
}
