// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hcnet/asymptotics.hpp"
#include "hcnet/bd.hpp"
#include "hcnet/config.hpp"
#include "hcnet/error.hpp"
#include "hcnet/mixing.hpp"
#include "hcnet/rng.hpp"
#include "hcnet/simulate.hpp"
#include "hcnet/stats.hpp"
#include "oracles.hpp"

using namespace hcnet;

namespace {

const std::vector<std::string> kCases{"1a", "1b",      "1c", "1d",      "2a", "2b_star",
                                      "2b_star2", "2b_star3", "2c", "2c_star", "2d", "3"};

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [fail: " << what << "]";
        }
    }
};

RunConfig preset(const std::string& name) { return load_config(std::string(HCNET_PRESET_DIR) + "/case" + name + ".json"); }

Network network_of(const RunConfig& c) { return validate_spec(c.network); }

PowerLawRate linear_rate() { return {1.0, Rational(1)}; }

std::vector<BDBranch> branch_family() {
    std::vector<BDBranch> out;
    Rng rng(2024, 0);
    for (int L = 1; L <= 8; ++L) {
        out.push_back(BDBranch::standard(L, linear_rate()));
        BDBranch b;
        b.L = L;
        b.rate = linear_rate();
        for (int l = 1; l < L; ++l) b.birth.push_back(0.25 + 2.0 * rng.uniform());
        for (int l = 1; l <= L; ++l) b.death.push_back(0.25 + 2.0 * rng.uniform());
        out.push_back(b);
    }
    return out;
}

const std::vector<double> kBranchNus{0.5, 2.0, 10.0, 150.0};

void c1(Outcome& o) {
    double worst = 0.0, secs = 0.0;
    for (const auto& b : branch_family())
        for (double nu : kBranchNus) {
            const auto gen = oracle::branch_chain(b, nu);
            for (int l1 = 1; l1 <= b.L; ++l1)
                for (int l2 = 0; l2 < l1; ++l2) {
                    std::vector<char> targets(static_cast<std::size_t>(b.L + 1), 0);
                    for (int l = 0; l <= l2; ++l) targets[static_cast<std::size_t>(l)] = 1;
                    const auto start = std::chrono::steady_clock::now();
                    const double fast = mean_hitting(b, l1, l2, nu);
                    secs += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                    worst = std::max(worst, oracle::rel_diff(fast, oracle::mean_hitting(gen, l1, targets)));
                }
        }
    o.detail << "max rel diff " << worst << ", library time " << secs << " s";
    o.require(worst <= 1e-9, "relative difference above 1e-9");
    o.require(secs < 1.0, "runtime above 1 s");
}

void c2(Outcome& o) {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0, min_gap = 1.0;
    bool positive = true;
    for (const auto& b : branch_family())
        for (double nu : kBranchNus) {
            const auto th = escape_spectrum(b, nu).eigenvalues;
            double inv = 0.0;
            for (std::size_t i = 0; i < th.size(); ++i) {
                positive = positive && th[i] > 0.0;
                inv += 1.0 / th[i];
                if (i > 0) min_gap = std::min(min_gap, (th[i] - th[i - 1]) / th[i]);
            }
            worst = std::max(worst, oracle::rel_diff(inv, mean_hitting(b, b.L, 0, nu)));
        }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.detail << "max rel diff " << worst << ", min relative gap " << min_gap << ", " << secs << " s";
    o.require(worst <= 1e-9, "sum of 1/theta differs from the mean");
    o.require(positive, "nonpositive eigenvalue");
    o.require(min_gap > 1e-9, "eigenvalues not distinct");
    o.require(secs < 1.0, "runtime above 1 s");
}

void c3(Outcome& o) {
    for (int L : {2, 3, 4}) {
        const auto b = BDBranch::standard(L, linear_rate());
        const auto th = escape_spectrum(b, 1e4).eigenvalues;
        const double m = mean_hitting(b, L, 0, 1e4);
        o.detail << " L=" << L << ": theta1*ET=" << th[0] * m << " theta2*ET=" << th[1] * m << ";";
        o.require(th[0] * m >= 0.98 && th[0] * m <= 1.02, "theta1 E T outside [0.98, 1.02]");
        o.require(th[1] * m > 50.0, "theta2 E T not above 50");
    }
}

void c4(Outcome& o) {
    const int c = 4;
    const double nu = 1e3;
    const auto b = BDBranch::mmc(c, linear_rate());
    for (int s = 1; s <= c; ++s) {
        const double v = mean_hitting(b, s, 0, nu) * std::tgamma(c + 1.0) / std::pow(nu, c - 1.0);
        o.detail << " s=" << s << ": " << v << ";";
        o.require(std::fabs(v - 1.0) <= 0.05, "drain time off by more than 5%");
    }
}

void c5(Outcome& o) {
    for (const auto& name : kCases) {
        const auto cfg = preset(name);
        const auto net = network_of(cfg);
        const auto s = *cfg.source, t = *cfg.target;
        const auto c = classify(net, s.branch, s.level, t.branch, t.level);
        const double ratio = exact_mean_transition(net, 1e4, s, t) / asym_mean_transition(c).at(1e4);
        o.detail << " " << name << "=" << ratio;
        o.require(ratio >= 0.97 && ratio <= 1.03, name + " ratio outside [0.97, 1.03]");
    }
}

void c6(Outcome& o) {
    std::ifstream in(HCNET_GOLDEN_LABELS);
    std::string line;
    int checked = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string file, caption, scenario, alias;
        ss >> file >> caption >> scenario >> alias;
        const auto cfg = load_config(std::string(HCNET_PRESET_DIR) + "/" + file + ".json");
        const auto net = network_of(cfg);
        const auto c = classify(net, cfg.source->branch, cfg.source->level, cfg.target->branch, cfg.target->level);
        const bool caption_ok = c.scenario == caption || c.alias == caption;
        o.require(caption_ok && c.scenario == scenario && c.alias == alias, file + " labelled " + c.scenario);
        ++checked;
    }
    o.detail << checked << " presets against the golden labels";
    o.require(checked == 12, "expected twelve golden entries");
}

void c7(Outcome& o) {
    const auto start = std::chrono::steady_clock::now();
    for (const auto& name : kCases) {
        const auto cfg = preset(name);
        const auto net = network_of(cfg);
        const auto s = *cfg.source, t = *cfg.target;
        const auto c = classify(net, s.branch, s.level, t.branch, t.level);
        const LimitLaw law(c);
        SimOptions opt;
        opt.nu = 150.0;
        opt.replications = 20000;
        opt.seed = 0;
        opt.workers = 0;
        opt.horizon = 1e4 * asym_mean_transition(c).at(opt.nu);
        const auto rep = sample_transition(net, s, t, opt);
        const double mean = exact_mean_transition(net, opt.nu, s, t);
        std::vector<double> scaled;
        for (double x : rep.samples) scaled.push_back(x / mean);
        const double ks = ks_statistic(scaled, [&](double x) { return law.cdf(x); });
        const bool exponential = c.scenario == "3" || c.scenario == "2b***" || c.scenario == "2c*";
        const double limit = exponential ? 0.05 : 0.10;
        o.detail << " " << c.scenario << "=" << ks;
        if (law.atom_at_zero() > 0.0) {
            const auto near = std::count_if(scaled.begin(), scaled.end(), [](double x) { return x < 0.05; });
            o.detail << " (atom " << law.atom_at_zero() << ", fraction below 0.05: "
                     << static_cast<double>(near) / static_cast<double>(scaled.size()) << ")";
        }
        o.require(ks <= limit, c.scenario + " KS above " + (exponential ? std::string("0.05") : std::string("0.10")));
        o.require(rep.censored_fraction() <= 1e-3, c.scenario + " censored");
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.detail << "; " << secs << " s";
    o.require(secs <= 600.0, "runtime above 10 min");
}

void c8(Outcome& o) {
    double worst_closed = 0.0, worst_mean = 0.0;
    for (const auto& name : kCases) {
        const auto cfg = preset(name);
        const auto net = network_of(cfg);
        const auto c = classify(net, cfg.source->branch, cfg.source->level, cfg.target->branch, cfg.target->level);
        const LimitLaw law(c);
        static const std::vector<std::string> rows{"1c", "2a", "2b*", "2b***", "2c", "2c*", "3"};
        if (std::find(rows.begin(), rows.end(), c.scenario) != rows.end()) {
            for (int i = 1; i <= 200; ++i) {
                const double x = 0.05 * i;
                worst_closed = std::max(worst_closed, std::fabs(law.cdf(x) - law.cdf_inverted(x)));
                worst_closed = std::max(worst_closed, std::fabs(law.pdf(x) - law.pdf_inverted(x)));
            }
        }
        const double h = 1e-6;
        const double slope = -(law.laplace(h) - law.laplace(-h)) / (2 * h);
        worst_mean = std::max(worst_mean, std::fabs(slope - (c.alpha + (1 - c.alpha) * (1 - c.gammaN))));
    }
    o.detail << "max closed-form gap " << worst_closed << ", max mean-identity gap " << worst_mean;
    o.require(worst_closed <= 1e-6, "inversion disagrees with a closed form");
    o.require(worst_mean <= 1e-6, "-L'(0) differs from the mean identity");
}

void c9(Outcome& o) {
    const auto cfg = preset("3");
    const auto net = network_of(cfg);
    const auto s = *cfg.source;
    const int k2 = cfg.target->branch;
    const double mean = exact_mean_transition(net, 150.0, s, {k2, 1});
    const std::vector<double> omegas{0.25, 0.5, 1.0, 2.0};
    std::vector<double> times;
    for (double w : omegas) times.push_back(w * mean);
    const auto est = estimate_starvation(net, 150.0, k2, times, 10000, 0, s, 0);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        o.detail << " w=" << omegas[i] << ": " << est[i].probability << " vs " << std::exp(-omegas[i]) - 0.05 << ";";
        o.require(est[i].probability >= std::exp(-omegas[i]) - 0.05, "starvation below the bound");
    }
}

void c10(Outcome& o) {
    NetworkSpec spec;
    spec.components.push_back({3, linear_rate(), {}, {}});
    const auto net = validate_spec(spec);
    const double nu = 1e3, omega = 0.5, delta = 0.1;
    const StarState source{0, 3};
    const double mean = exact_mean_transition(net, nu, source, StarState::root());
    const auto occ = occupancy_functionals(net, nu, source, omega * mean, delta, 1000, 0, 0);
    o.detail << "P(saturated)=" << occ.saturated_fraction << " vs " << std::exp(-omega) - 0.05;
    o.require(occ.saturated_fraction >= std::exp(-omega) - 0.05, "near-saturation probability below the bound");
    o.require(occ.violations == 0, "pathwise ordering violated");
    const auto rr = residual_ratio(net, nu, source, 200, 1, 0);
    o.detail << "; E tau_res/E T=" << rr.ratio << " (exact " << rr.exact_ratio << ")";
    o.require(rr.ratio >= 0.95, "residual ratio below 0.95");
}

void c11(Outcome& o) {
    const std::vector<std::vector<int>> shapes{{3, 3}, {2, 5}, {4, 1, 2}};
    for (const auto& shape : shapes) {
        NetworkSpec spec;
        for (int L : shape) spec.components.push_back({L, linear_rate(), {}, {}});
        const auto net = validate_spec(spec);
        for (int k = 0; k < net.num_components(); ++k) {
            const auto rep = branch_conductance(net, 1e4, k);
            const double ratio = rep.phi / rep.asymptotic->at(1e4);
            o.detail << " " << ratio;
            o.require(ratio >= 0.99 && ratio <= 1.01, "conductance ratio outside 1%");
        }
    }
    {
        NetworkSpec spec;
        spec.components = {{2, linear_rate(), {}, {}}, {5, {1.0, Rational(1, 2)}, {}, {}}};
        const auto rep = branch_conductance(validate_spec(spec), 1e4, 1);
        o.detail << "; sublinear L=5 branch (not gated) " << rep.phi / rep.asymptotic->at(1e4);
    }
    NetworkSpec sym;
    sym.components = {{3, linear_rate(), {}, {}}, {3, linear_rate(), {}, {}}};
    const auto net = validate_spec(sym);
    for (double nu : {10.0, 50.0}) {
        const auto b = mixing_lower_bound(net, nu, 0.5, 0.1);
        const double tm = t_mix_exact(net, nu, 0.1);
        o.detail << "; nu=" << nu << " bound=" << b.bound << " t_mix=" << tm;
        o.require(b.bound < tm, "bound exceeds the exact mixing time");
    }
}

void c12(Outcome& o) {
    NetworkSpec spec;
    spec.components.push_back({3, linear_rate(), {{0, 1}}, {}});
    const auto net = validate_spec(spec);
    const auto ext = extension_constants(net.component(0));
    const FullSpace space = enumerate_full_space(net);
    std::vector<char> targets(static_cast<std::size_t>(space.size()), 0);
    targets[static_cast<std::size_t>(space.index(0))] = 1;
    const double nu = 1e4;
    const double exact = mean_hitting_time(space.generator(nu), space.index(ext.argmax), targets);
    const double ratio = exact / ext.escape_mean.at(nu);
    const auto samples = sample_escape_full(space, nu, ext.argmax, 100000, 0, true, 0);
    std::vector<double> scaled;
    for (double x : samples) scaled.push_back(x / exact);
    const double ks = ks_statistic(scaled, [](double x) { return -std::expm1(-x); });
    o.detail << "mean ratio " << ratio << ", KS " << ks;
    o.require(ratio >= 0.97 && ratio <= 1.03, "escape mean ratio outside [0.97, 1.03]");
    o.require(ks <= 0.03, "scaled escape KS above 0.03");
}

void c13(Outcome& o) {
    NetworkSpec spec;
    spec.components = {{2, linear_rate(), {}, {}}, {3, {1.0, Rational(1, 2)}, {}, {}}};
    const auto net = validate_spec(spec);
    SimOptions opt;
    opt.nu = 10.0;
    opt.replications = 100000;
    opt.workers = 0;
    opt.seed = 11;
    const StarState source{0, 2}, target{1, 3};
    const auto star = sample_transition(net, source, target, opt);
    const FullSpace space = enumerate_full_space(net);
    opt.seed = 12;
    const auto full = sample_transition_full(space, 0b00011u, 0b11100u, opt);
    const double ks = ks_two_sample(star.samples, full.samples);
    o.detail << "two-sample KS " << ks;
    o.require(ks <= 0.01, "star and full-space laws differ");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"oracle equivalence of Keilson means", c1},
        {"spectral identity", c2},
        {"eigenvalue dominance at nu=1e4", c3},
        {"M/M/c drain time", c4},
        {"asymptotic mean convergence at nu=1e4", c5},
        {"scenario taxonomy golden file", c6},
        {"distribution reproduction at nu=150", c7},
        {"limit-law internal consistency", c8},
        {"starvation bound", c9},
        {"near-saturation", c10},
        {"mixing bounds", c11},
        {"intra-component extension", c12},
        {"aggregation exactness", c13},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [error: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2zu %s: %s (%.2f s) %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), secs,
                    o.detail.str().c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
