#include <cmath>
#include <numeric>

#include "doctest.h"
#include "hcnet/bd.hpp"
#include "hcnet/ctmc.hpp"
#include "hcnet/error.hpp"
#include "hcnet/model.hpp"
#include "oracles.hpp"

using namespace hcnet;

namespace {

SparseGenerator small_chain() {
    NetworkSpec spec;
    spec.components = {{2, {1.0, Rational(1)}, {}, {}}, {3, {0.5, Rational(1, 2)}, {}, {}}};
    return StarRates(validate_spec(spec), 4.0).generator();
}

}  // namespace

TEST_CASE("generator bookkeeping") {
    SparseGenerator g(3);
    g.add_rate(0, 1, 2.0);
    g.add_rate(0, 1, 1.0);
    g.add_rate(0, 0, 5.0);
    g.add_rate(0, 2, 0.0);
    g.add_rate(1, 2, 4.0);
    CHECK(g.transitions(0).size() == 1);
    CHECK(g.exit_rate(0) == doctest::Approx(3.0));
    CHECK(g.max_exit_rate() == doctest::Approx(4.0));
}

TEST_CASE("hitting times and rewards agree with the dense solve") {
    const auto g = small_chain();
    for (int target = 0; target < g.size(); ++target) {
        std::vector<char> t(static_cast<std::size_t>(g.size()), 0);
        t[static_cast<std::size_t>(target)] = 1;
        for (int s = 0; s < g.size(); ++s) {
            const double ref = oracle::mean_hitting(g, s, t);
            if (s == target)
                CHECK(mean_hitting_time(g, s, t) == 0.0);
            else
                CHECK(oracle::rel_diff(mean_hitting_time(g, s, t), ref) < 1e-12);
        }
    }
    std::vector<char> t(static_cast<std::size_t>(g.size()), 0);
    t[0] = 1;
    const std::vector<double> ones(static_cast<std::size_t>(g.size()), 1.0);
    CHECK(expected_reward_until_hit(g, 3, t, ones) == doctest::Approx(mean_hitting_time(g, 3, t)).epsilon(1e-13));
}

TEST_CASE("elimination keeps relative accuracy across extreme rates") {
    const auto b = BDBranch::standard(6, {1.0, Rational(1)});
    const auto gen = branch_generator(b, 1e5);
    std::vector<char> t(7, 0);
    t[0] = 1;
    CHECK(oracle::rel_diff(mean_hitting_time(gen, 6, t), oracle::mean_hitting(gen, 6, t)) < 1e-11);
}

TEST_CASE("Poisson weights") {
    for (double lambda : {0.0, 0.5, 30.0, 5000.0}) {
        const auto w = poisson_weights(lambda, 1e-12);
        const double total = std::accumulate(w.weights.begin(), w.weights.end(), 0.0);
        CHECK(total >= 1.0 - 1e-12);
        CHECK(total <= 1.0 + 1e-10);
    }
}

TEST_CASE("uniformization matches the matrix exponential") {
    const auto g = small_chain();
    for (double t : {0.01, 0.7, 12.0}) {
        const auto P = oracle::dense_transition(g, t);
        const auto dense = transition_matrix(g, t);
        for (int x = 0; x < g.size(); ++x) {
            std::vector<double> p0(static_cast<std::size_t>(g.size()), 0.0);
            p0[static_cast<std::size_t>(x)] = 1.0;
            const auto p = transient_distribution(g, p0, t);
            for (int y = 0; y < g.size(); ++y) {
                CHECK(std::fabs(p[static_cast<std::size_t>(y)] - P(x, y)) < 1e-10);
                CHECK(std::fabs(dense[static_cast<std::size_t>(x * g.size() + y)] - P(x, y)) < 1e-10);
            }
        }
    }
}

TEST_CASE("reversible phase-type representation of hitting times") {
    NetworkSpec spec;
    spec.components.push_back({3, {1.0, Rational(1)}, {{0, 1}}, {}});
    const auto net = validate_spec(spec);
    const auto space = enumerate_full_space(net);
    const auto gen = space.generator(6.0);
    const auto pi = space.stationary(6.0);
    std::vector<char> targets(static_cast<std::size_t>(space.size()), 0);
    targets[static_cast<std::size_t>(space.index(0))] = 1;
    const int source = space.index(0b110);
    const ReversiblePhaseType ph(gen, pi, source, targets);
    CHECK(ph.mean() == doctest::Approx(mean_hitting_time(gen, source, targets)).epsilon(1e-10));
    CHECK(ph.survival(0.0) == doctest::Approx(1.0));
    for (double t : {0.3, 2.0, 9.0}) {
        SparseGenerator absorbed(gen.size());
        for (int x = 0; x < gen.size(); ++x)
            if (!targets[static_cast<std::size_t>(x)])
                for (const auto& tr : gen.transitions(x)) absorbed.add_rate(x, tr.to, tr.rate);
        const auto Pt = oracle::dense_transition(absorbed, t);
        CHECK(ph.survival(t) == doctest::Approx(1.0 - Pt(source, space.index(0))).epsilon(1e-9));
        CHECK(ph.inverse_survival(ph.survival(t)) == doctest::Approx(t).epsilon(1e-9));
    }
    std::vector<double> skewed(pi);
    skewed[1] *= 2.0;
    CHECK_THROWS_AS(ReversiblePhaseType(gen, skewed, source, targets), Error);
}
