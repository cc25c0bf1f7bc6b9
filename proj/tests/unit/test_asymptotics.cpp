#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hcnet/asymptotics.hpp"
#include "hcnet/bd.hpp"
#include "hcnet/config.hpp"
#include "hcnet/error.hpp"
#include "hcnet/laplace.hpp"
#include "hcnet/rng.hpp"
#include "hcnet/simulate.hpp"
#include "oracles.hpp"

using namespace hcnet;

namespace {

Network make(std::vector<int> L, std::vector<Rational> a, std::vector<double> c = {}) {
    NetworkSpec spec;
    for (std::size_t i = 0; i < L.size(); ++i)
        spec.components.push_back({L[i], {c.empty() ? 1.0 : c[i], a[i]}, {}, {}});
    return validate_spec(spec);
}

const std::vector<std::string> kPresets{"case1a",      "case1b",       "case1c",       "case1d",
                                        "case2a",      "case2b_star",  "case2b_star2", "case2b_star3",
                                        "case2c",      "case2c_star",  "case2d",       "case3"};

BranchClassification classify_preset(const std::string& name) {
    const auto cfg = load_config(std::string(HCNET_PRESET_DIR) + "/" + name + ".json");
    const auto net = validate_spec(cfg.network);
    return classify(net, cfg.source->branch, cfg.source->level, cfg.target->branch, cfg.target->level);
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::NumericFailure;
}

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

}  // namespace

TEST_CASE("classification of the documented examples") {
    const auto b = classify(make({3, 5, 5}, {Rational(1, 2), Rational(1, 2), Rational(1, 2)}), 0, 3, 2, 5);
    CHECK(b.K_star == std::vector<int>{1});
    CHECK(b.gamma[1] == doctest::Approx(1.0));
    CHECK(b.beta[1] == doctest::Approx(1.0));
    CHECK(b.alpha == 0.0);
    CHECK(b.scenario == "1b*");
    CHECK(b.alias == "1b");

    const auto c = classify(make({5, 2, 5}, {Rational(1, 2), Rational(3, 2), Rational(1)}), 0, 5, 2, 5);
    CHECK(c.K_star == std::vector<int>{1});
    CHECK(c.S == std::vector<int>{1});
    CHECK(c.gammaS == doctest::Approx(1.0));
    CHECK(c.alpha == doctest::Approx(0.5));
    CHECK(c.scenario == "2c*");

    const auto s3 = classify(make({3, 3, 3}, {Rational(1), Rational(3, 4), Rational(3, 2)}), 0, 3, 2, 3);
    CHECK(s3.K_star == std::vector<int>{0});
    CHECK(s3.alpha == doctest::Approx(1.0));
    CHECK(s3.scenario == "3");
    const auto m3 = asym_mean_transition(s3);
    CHECK(m3.coefficient == doctest::Approx(1.0 / 3));
    CHECK(m3.exponent == Rational(2));

    const auto two = classify(make({2, 2}, {Rational(1), Rational(1)}), 0, 2, 1, 2);
    const auto m2 = asym_mean_transition(two);
    CHECK(m2.coefficient == doctest::Approx(1.0));
    CHECK(m2.exponent == Rational(1));
}

TEST_CASE("classification rejects bad endpoints") {
    const auto net = make({2, 3}, {Rational(1), Rational(1)});
    CHECK(code_of([&] { classify(net, 1, 2, 1, 3); }) == ErrorCode::SameBranch);
    CHECK(code_of([&] { classify(net, 0, 3, 1, 3); }) == ErrorCode::LevelOutOfRange);
    CHECK(code_of([&] { classify(net, 0, 2, 1, 0); }) == ErrorCode::LevelOutOfRange);
    NetworkSpec intra;
    intra.components = {{3, {1.0, Rational(1)}, {{0, 1}}, {}}, {2, {1.0, Rational(1)}, {}, {}}};
    const auto with_edges = validate_spec(intra);
    CHECK(code_of([&] { classify(with_edges, 0, 2, 1, 2); }) == ErrorCode::AggregationInvalid);
}

TEST_CASE("golden labels for the preset cases") {
    std::ifstream in(HCNET_GOLDEN_LABELS);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string preset, caption, scenario, alias;
        ss >> preset >> caption >> scenario >> alias;
        const auto c = classify_preset(preset);
        CHECK(c.scenario == scenario);
        CHECK(c.alias == alias);
        ++rows;
    }
    CHECK(rows == 12);
}

TEST_CASE("classification invariants hold across presets and random specs") {
    std::vector<BranchClassification> all;
    for (const auto& p : kPresets) all.push_back(classify_preset(p));
    Rng rng(99, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const int K = 3 + static_cast<int>(rng.uniform() * 3);
        std::vector<int> L;
        std::vector<Rational> a;
        std::vector<double> c;
        for (int k = 0; k < K; ++k) {
            L.push_back(1 + static_cast<int>(rng.uniform() * 5));
            a.push_back(Rational(1 + static_cast<int>(rng.uniform() * 8), 1 + static_cast<int>(rng.uniform() * 4)));
            c.push_back(rng.uniform() < 0.5 ? 1.0 : 0.5 + rng.uniform());
        }
        const auto net = make(L, a, c);
        const int k1 = static_cast<int>(rng.uniform() * K);
        int k2 = static_cast<int>(rng.uniform() * (K - 1));
        if (k2 >= k1) ++k2;
        all.push_back(classify(net, k1, L[k1], k2, 1 + static_cast<int>(rng.uniform() * L[k2])));
    }
    for (const auto& c : all) {
        double total = 0.0;
        for (std::size_t k = 0; k < c.gamma.size(); ++k) {
            total += c.gamma[k];
            CHECK((c.gamma[k] > 0.0) == contains(c.K_star, static_cast<int>(k)));
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
        CHECK_FALSE(c.K_star.empty());
        CHECK(c.N.size() + c.A.size() + c.S.size() == c.K_star.size());
        for (int k : c.K_star) {
            const double b = c.beta[static_cast<std::size_t>(k)];
            CHECK(contains(c.N, k) == (b == 0.0));
            CHECK(contains(c.A, k) == (b > 0.0 && std::isfinite(b)));
            CHECK(contains(c.S, k) == std::isinf(b));
        }
        CHECK(c.alpha >= 0.0);
        CHECK(c.alpha <= 1.0);

        const LimitLaw law(c);
        CHECK(law.laplace(0.0) == doctest::Approx(1.0).epsilon(1e-14));
        const double h = 1e-6;
        const double slope = (law.laplace(h) - law.laplace(-h)) / (2 * h);
        CHECK(std::fabs(-slope - (c.alpha + (1 - c.alpha) * (1 - c.gammaN))) < 1e-6);
        if (c.alpha > 0.0) CHECK(law.atom_at_zero() == 0.0);
        const double far = law.laplace(1e12);
        CHECK(std::fabs(far - law.atom_at_zero()) < 1e-6);
    }
}

TEST_CASE("homogeneous networks only produce the two starred scenarios") {
    Rng rng(5, 1);
    for (int trial = 0; trial < 200; ++trial) {
        const int K = 2 + static_cast<int>(rng.uniform() * 4);
        const Rational a(1 + static_cast<int>(rng.uniform() * 6), 1 + static_cast<int>(rng.uniform() * 3));
        const double coef = 0.5 + rng.uniform();
        std::vector<int> L;
        for (int k = 0; k < K; ++k) L.push_back(1 + static_cast<int>(rng.uniform() * 6));
        const auto net = make(L, std::vector<Rational>(static_cast<std::size_t>(K), a),
                              std::vector<double>(static_cast<std::size_t>(K), coef));
        const int k1 = static_cast<int>(rng.uniform() * K);
        const int k2 = (k1 + 1 + static_cast<int>(rng.uniform() * (K - 1))) % K;
        const auto c = classify(net, k1, L[k1], k2, L[k2]);
        CHECK((c.scenario == "1b*" || c.scenario == "2b***"));
        CHECK(c.scenario == (contains(c.K_star, k1) ? "2b***" : "1b*"));
        if (c.scenario == "2b***") {
            int Lstar = 0;
            for (int k = 0; k < K; ++k)
                if (k != k2) Lstar = std::max(Lstar, L[k]);
            const double ratio = static_cast<double>(L[k2]) / (c.K_star.size() * Lstar);
            CHECK(c.alpha == doctest::Approx(ratio / (1.0 + ratio)));
            for (int k : c.A)
                CHECK(c.beta[static_cast<std::size_t>(k)] / c.gamma[static_cast<std::size_t>(k)] ==
                      doctest::Approx((1.0 - c.alpha) / c.alpha));
        }
    }
}

TEST_CASE("limit transforms match the closed forms of each row") {
    for (const auto& p : kPresets) {
        const auto c = classify_preset(p);
        const LimitLaw law(c);
        for (double s : {0.1, 1.0, 10.0}) {
            double expected = -1.0;
            if (c.scenario == "3" || c.scenario == "2b***") expected = 1.0 / (1.0 + s);
            if (c.scenario == "1a") expected = 1.0;
            if (c.scenario == "1c") expected = 1.0 / (1.0 + c.gammaS * s);
            if (c.scenario == "2c*") expected = 1.0 / ((1.0 + c.alpha * s) * (1.0 + c.alpha * s));
            if (c.scenario == "2a") expected = 1.0 / ((1.0 + c.alpha * s) * (1.0 + (1.0 - c.alpha) * c.gammaS * s));
            if (c.scenario == "1b*") {
                const double beta = c.betaA, lambda = beta / c.gammaA;
                const double p0 = 1.0 / (1.0 + beta);
                expected = p0 / (1.0 - (1.0 - p0) * lambda / (lambda + s));
            }
            if (expected >= 0.0) CHECK(std::fabs(law.laplace(s) - expected) < 1e-12);
        }
    }
}

TEST_CASE("closed-form laws agree with numerical inversion") {
    for (const auto& p : kPresets) {
        const auto c = classify_preset(p);
        const LimitLaw law(c);
        if (!law.closed_form() || c.scenario == "1a") continue;
        for (int i = 1; i <= 100; ++i) {
            const double x = 0.1 * i;
            CHECK(std::fabs(law.cdf(x) - law.cdf_inverted(x)) < 1e-6);
            CHECK(std::fabs(law.pdf(x) - law.pdf_inverted(x)) < 1e-6);
        }
    }
    const auto s3 = LimitLaw(classify_preset("case3"));
    CHECK(s3.cdf(1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    const auto c2 = classify_preset("case2c_star");
    const LimitLaw erlang(c2);
    for (double x : {0.2, 1.0, 3.0}) {
        const double y = x / c2.alpha;
        CHECK(erlang.cdf(x) == doctest::Approx(1.0 - std::exp(-y) * (1.0 + y)).epsilon(1e-12));
        CHECK(erlang.pdf(x) == doctest::Approx(y * std::exp(-y) / c2.alpha).epsilon(1e-12));
    }
}

TEST_CASE("generic rows integrate to the continuous mass") {
    const LimitLaw law(classify_preset("case1d"));
    const int n = 4001;
    const double xmax = 40.0, h = xmax / (n - 1);
    double area = 0.0;
    for (int i = 0; i < n; ++i) area += (i == 0 || i == n - 1 ? 0.5 : 1.0) * law.pdf(i * h);
    CHECK(std::fabs(area * h - (1.0 - law.atom_at_zero())) < 1e-4);
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
        const double v = law.cdf(0.05 * i);
        CHECK(v >= prev - 1e-9);
        prev = v;
    }
}

TEST_CASE("degenerate row is a point mass at zero") {
    const LimitLaw law(classify_preset("case1a"));
    CHECK(law.atom_at_zero() == 1.0);
    CHECK(law.mean() == 0.0);
    CHECK(law.cdf(0.0) == 1.0);
    CHECK(law.cdf(3.0) == 1.0);
}

TEST_CASE("atom of the single attracting branch") {
    const auto c = classify_preset("case1b");
    const LimitLaw law(c);
    const double p0 = 1.0 / (1.0 + c.betaA);
    CHECK(law.atom_at_zero() == doctest::Approx(p0).epsilon(1e-12));

    Rng rng(3, 0);
    const long n = 200000;
    long zeros = 0;
    std::vector<double> z;
    const double lambda = c.betaA / c.gammaA;
    for (long i = 0; i < n; ++i) {
        const auto g = rng.geometric(p0);
        if (g == 0) ++zeros;
        double s = 0.0;
        for (long j = 0; j < g; ++j) s += rng.exponential(lambda);
        z.push_back(s);
    }
    const double freq = static_cast<double>(zeros) / n;
    CHECK(std::fabs(freq - p0) < 3.0 * std::sqrt(p0 * (1 - p0) / n));
    CHECK(ks_statistic(z, [&](double x) { return law.cdf(x); }) < 0.01);
}

TEST_CASE("marked Poisson construction reproduces the W law") {
    const auto c = classify_preset("case1d");
    const auto r = marked_poisson_check(c, 1000000, 17);
    CHECK(r.ks <= 0.01);
    CHECK(std::fabs(r.mean - r.expected_mean) < 3.0 * r.standard_error);
    CHECK(r.expected_mean == doctest::Approx(1.0 - c.gammaN));
    CHECK(code_of([] { marked_poisson_check(classify_preset("case3"), 10, 0); }) == ErrorCode::WrongScenario);
}

TEST_CASE("extension constants for components with conflicts") {
    const PowerLawRate lin{1.0, Rational(1)};
    const auto pair = extension_constants(Component{2, lin, {}, {}});
    CHECK(pair.g.exponent == Rational(2));
    CHECK(pair.psi == doctest::Approx(1.0));
    CHECK(pair.escape_mean.exponent == Rational(1));
    CHECK(pair.escape_mean.coefficient == doctest::Approx(0.5));
    const auto bd = asym_mean_hitting(BDBranch::standard(2, lin), 0);
    CHECK(pair.escape_mean.coefficient == doctest::Approx(bd.coefficient));

    const auto tri = extension_constants(Component{3, lin, {{0, 1}}, {}});
    CHECK(tri.g.exponent == Rational(2));
    CHECK(tri.psi == doctest::Approx(2.0));
    CHECK(tri.F.coefficient == doctest::Approx(3.0));
    CHECK(tri.escape_mean.coefficient == doctest::Approx(2.0 / 3));
    CHECK((tri.argmax == 0b101u || tri.argmax == 0b110u));

    const auto one = extension_constants(Component{1, lin, {}, {}});
    CHECK(one.g.exponent == Rational(1));
    CHECK(one.psi == doctest::Approx(1.0));
    CHECK(one.escape_mean.exponent == Rational(0));
    CHECK(one.escape_mean.coefficient == doctest::Approx(1.0));
}

TEST_CASE("Talbot inversion of simple transforms") {
    const ComplexFunction exp1 = [](std::complex<double> s) { return 1.0 / (s * (1.0 + s)); };
    for (double t : {0.1, 1.0, 5.0}) CHECK(talbot_invert(exp1, t) == doctest::Approx(1.0 - std::exp(-t)).epsilon(1e-9));
    const Polynomial p({1.0, 2.0, 3.0});
    CHECK(p(2.0) == doctest::Approx(17.0));
    CHECK((p * Polynomial::linear(1.0, 1.0)).degree() == 3);
    CHECK(p.scaled(2.0)(1.0) == doctest::Approx(17.0));
}
