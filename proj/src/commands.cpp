#include "hcnet/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hcnet/asymptotics.hpp"
#include "hcnet/bd.hpp"
#include "hcnet/error.hpp"
#include "hcnet/mixing.hpp"
#include "hcnet/simulate.hpp"
#include "hcnet/stats.hpp"
#include "json.hpp"

#ifndef HCNET_VERSION
#define HCNET_VERSION "0.0.0"
#endif

namespace hcnet {

using nlohmann::ordered_json;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"classify", "mean", "law", "simulate", "starve", "mix"};
    return names;
}

namespace {

constexpr double kMaxCensoredFraction = 1e-3;

ordered_json number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

ordered_json term_json(const PowerTerm& t) {
    return {{"coefficient", number(t.coefficient)}, {"exponent", t.exponent.str()}};
}

ordered_json one_based(const std::vector<int>& v) {
    ordered_json out = ordered_json::array();
    for (int k : v) out.push_back(k + 1);
    return out;
}

ordered_json numbers(const std::vector<double>& v) {
    ordered_json out = ordered_json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

class Csv {
public:
    explicit Csv(const std::string& header, const std::string& comment = "") {
        if (!comment.empty()) out_ << "# " << comment << '\n';
        out_ << header << '\n';
    }
    template <class... Cells>
    void row(const Cells&... cells) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
        out_ << '\n';
    }
    std::string str() const { return out_.str(); }

private:
    static std::string cell(double x) { return format_double(x); }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(long x) { return std::to_string(x); }
    static std::string cell(long long x) { return std::to_string(x); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    std::ostringstream out_;
};

struct Context {
    const RunConfig& cfg;
    Network net;
    CommandOutput out;
    ordered_json outputs = ordered_json::object();

    explicit Context(const RunConfig& c) : cfg(c), net(validate_spec(c.network)) {}

    StarState source() const {
        if (!cfg.source) throw Error(ErrorCode::ConfigError, "config needs a 'source' state");
        return *cfg.source;
    }
    StarState target() const {
        if (!cfg.target) throw Error(ErrorCode::ConfigError, "config needs a 'target' state");
        return *cfg.target;
    }
    void warn(const std::string& w) { out.warnings.push_back(w); }
    void file(const std::string& name, const std::string& bytes) { out.files.emplace_back(name, bytes); }
};

BranchClassification classify_pair(const Context& ctx) {
    const auto s = ctx.source(), t = ctx.target();
    if (s.is_root() || t.is_root())
        throw Error(ErrorCode::LevelOutOfRange, "classification needs source and target inside branches");
    return classify(ctx.net, s.branch, s.level, t.branch, t.level);
}

ordered_json classification_json(const BranchClassification& c) {
    const LimitLaw law(c);
    return {{"scenario", c.scenario},
            {"alias", c.alias},
            {"gamma", numbers(c.gamma)},
            {"beta", numbers(c.beta)},
            {"alpha", c.alpha},
            {"K_star", one_based(c.K_star)},
            {"N", one_based(c.N)},
            {"A", one_based(c.A)},
            {"S", one_based(c.S)},
            {"gamma_N", c.gammaN},
            {"gamma_A", c.gammaA},
            {"gamma_S", c.gammaS},
            {"beta_A", number(c.betaA)},
            {"escape_term", term_json(c.escape_term)},
            {"visit_term", term_json(c.visit_term)},
            {"asymptotic_mean", term_json(asym_mean_transition(c))},
            {"law", {{"mean", law.mean()}, {"atom_at_zero", law.atom_at_zero()}, {"closed_form", law.closed_form()}}}};
}

void degenerate_warning(Context& ctx, const LimitLaw& law) {
    if (law.atom_at_zero() >= 1.0)
        ctx.warn("limit law is the point mass at 0; scaled transition times are degenerate");
}

std::vector<double> grid_or_nu(const RunConfig& cfg) { return cfg.nu_grid.empty() ? std::vector<double>{cfg.nu} : cfg.nu_grid; }

// Single-component network used for escape means with intra conflicts.
Network component_network(const Network& net, int k) {
    NetworkSpec spec;
    spec.components.push_back(net.component(k));
    return validate_spec(spec);
}

FullState full_state_of(const FullSpace& space, const Network& net, const StarState& s, const std::vector<int>& users) {
    if (s.is_root()) return 0;
    if (s.level > net.size(s.branch)) throw Error(ErrorCode::LevelOutOfRange, "level outside the component");
    FullState x = 0;
    if (users.empty())
        for (int u = 0; u < s.level; ++u) x |= FullState{1} << space.user(s.branch, u);
    for (int u : users) x |= FullState{1} << space.user(s.branch, u);
    space.index(x);  // throws unless x is an independent set
    return x;
}

void cmd_classify(Context& ctx) {
    const auto c = classify_pair(ctx);
    ctx.outputs = classification_json(c);
    ctx.out.summary = c.scenario == c.alias ? c.scenario : c.scenario + " (" + c.alias + ")";
}

void cmd_mean(Context& ctx) {
    Csv table("nu,exact_mean,asymptotic_mean,ratio");
    PowerTerm asym;
    if (ctx.net.has_intra_structure()) {
        const int k = ctx.cfg.source && !ctx.cfg.source->is_root() ? ctx.cfg.source->branch : 0;
        const Network single = component_network(ctx.net, k);
        const auto ext = extension_constants(single.component(0));
        asym = ext.escape_mean;
        const FullSpace space = enumerate_full_space(single);
        std::vector<char> targets(static_cast<std::size_t>(space.size()), 0);
        targets[static_cast<std::size_t>(space.index(0))] = 1;
        ctx.outputs["mode"] = "escape from a maximal independent set";
        ctx.outputs["component"] = k + 1;
        ctx.outputs["g"] = term_json(ext.g);
        ctx.outputs["psi"] = ext.psi;
        ctx.outputs["eta"] = ext.eta.str();
        ctx.outputs["F"] = term_json(ext.F);
        ordered_json rows = ordered_json::array();
        for (double nu : grid_or_nu(ctx.cfg)) {
            const double exact = mean_hitting_time(space.generator(nu), space.index(ext.argmax), targets);
            const double a = asym.at(nu);
            table.row(nu, exact, a, exact / a);
            rows.push_back({{"nu", nu}, {"exact_mean", exact}, {"asymptotic_mean", a}, {"ratio", exact / a}});
        }
        ctx.outputs["rows"] = rows;
    } else {
        const auto s = ctx.source(), t = ctx.target();
        if (s == t) throw Error(ErrorCode::ConfigError, "source and target coincide");
        if (t.is_root()) {
            if (s.is_root()) throw Error(ErrorCode::ConfigError, "source and target coincide");
            asym = asym_mean_hitting(BDBranch::standard(ctx.net.size(s.branch), ctx.net.rate(s.branch)), 0);
            ctx.outputs["mode"] = "escape";
        } else {
            const auto c = classify(ctx.net, s.branch, s.level, t.branch, t.level);
            asym = asym_mean_transition(c);
            ctx.outputs["mode"] = "transition";
            ctx.outputs["scenario"] = c.scenario;
        }
        ordered_json rows = ordered_json::array();
        for (double nu : grid_or_nu(ctx.cfg)) {
            const double exact = exact_mean_transition(ctx.net, nu, s, t);
            const double a = asym.at(nu);
            table.row(nu, exact, a, exact / a);
            rows.push_back({{"nu", nu}, {"exact_mean", exact}, {"asymptotic_mean", a}, {"ratio", exact / a}});
        }
        ctx.outputs["rows"] = rows;
    }
    ctx.outputs["asymptotic_mean"] = term_json(asym);
    ctx.file("table.csv", table.str());
    ctx.out.summary = "asymptotic mean " + format_double(asym.coefficient) + " * nu^" + asym.exponent.str();
}

void cmd_law(Context& ctx) {
    const auto c = classify_pair(ctx);
    const LimitLaw law(c);
    degenerate_warning(ctx, law);
    Csv csv("x,pdf,cdf", "atom_at_zero=" + format_double(law.atom_at_zero()));
    const int n = ctx.cfg.law_points;
    for (int i = 0; i < n; ++i) {
        const double x = ctx.cfg.law_max * i / (n - 1);
        csv.row(x, law.pdf(x), law.cdf(x));
    }
    ctx.file("law.csv", csv.str());
    ctx.outputs = {{"scenario", c.scenario},
                   {"alias", c.alias},
                   {"alpha", c.alpha},
                   {"atom_at_zero", law.atom_at_zero()},
                   {"mean", law.mean()},
                   {"closed_form", law.closed_form()},
                   {"grid", {{"max", ctx.cfg.law_max}, {"points", n}}}};
    ctx.out.summary = c.scenario + " atom=" + format_double(law.atom_at_zero());
}

void write_samples(Context& ctx, const std::vector<double>& raw, double mean) {
    Csv samples("replication,time,scaled");
    std::vector<double> scaled(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        scaled[i] = raw[i] / mean;
        samples.row(static_cast<long>(i), raw[i], scaled[i]);
    }
    ctx.file("samples.csv", samples.str());
    const auto h = freedman_diaconis_histogram(scaled);
    Csv hist("lower,upper,count,density");
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        hist.row(h.lower + h.width * static_cast<double>(b), h.lower + h.width * static_cast<double>(b + 1), h.counts[b],
                 h.density(b));
    ctx.file("histogram.csv", hist.str());
    const auto sum = summarize(scaled);
    ctx.outputs["scaled_mean"] = sum.mean;
    ctx.outputs["scaled_standard_error"] = sum.standard_error;
}

void censoring_check(Context& ctx, std::int64_t censored, std::int64_t reps) {
    ctx.outputs["censored"] = censored;
    if (static_cast<double>(censored) > kMaxCensoredFraction * static_cast<double>(reps)) {
        ctx.out.exit_code = exit_code(ErrorCode::CensoringOverflow);
        ctx.warn(std::string(to_string(ErrorCode::CensoringOverflow)) + ": " + std::to_string(censored) + " of " +
                 std::to_string(reps) + " replications exceeded the horizon");
    }
}

void cmd_simulate(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto s = ctx.source(), t = ctx.target();
    if (s == t) throw Error(ErrorCode::ConfigError, "source and target coincide");
    SimOptions opt;
    opt.nu = cfg.nu;
    opt.replications = cfg.replications;
    opt.seed = cfg.seed;
    opt.workers = cfg.workers;
    opt.accelerated = cfg.accelerated;
    ctx.outputs["space"] = cfg.space;

    std::optional<LimitLaw> law;
    if (!ctx.net.has_intra_structure() && !s.is_root() && !t.is_root()) {
        const auto c = classify(ctx.net, s.branch, s.level, t.branch, t.level);
        law.emplace(c);
        degenerate_warning(ctx, *law);
        ctx.outputs["scenario"] = c.scenario;
        opt.horizon = cfg.horizon_factor * asym_mean_transition(c).at(cfg.nu);
    }

    double exact = 0.0;
    SimReport rep;
    if (cfg.space == "star") {
        exact = exact_mean_transition(ctx.net, cfg.nu, s, t);
        if (!law) opt.horizon = cfg.horizon_factor * exact;
        rep = sample_transition(ctx.net, s, t, opt);
    } else {
        const FullSpace space = enumerate_full_space(ctx.net);
        const FullState xs = full_state_of(space, ctx.net, s, cfg.source_users),
                        xt = full_state_of(space, ctx.net, t, cfg.target_users);
        std::vector<char> targets(static_cast<std::size_t>(space.size()), 0);
        targets[static_cast<std::size_t>(space.index(xt))] = 1;
        const auto gen = space.generator(cfg.nu);
        exact = mean_hitting_time(gen, space.index(xs), targets);
        if (!law) opt.horizon = cfg.horizon_factor * exact;
        if (xt == 0 && cfg.accelerated) {
            rep.samples = sample_escape_full(space, cfg.nu, xs, cfg.replications, cfg.seed, true, cfg.workers);
        } else {
            rep = sample_transition_full(space, xs, xt, opt);
        }
    }
    ctx.outputs["exact_mean"] = exact;
    ctx.outputs["horizon"] = number(opt.horizon);
    write_samples(ctx, rep.samples, exact);
    std::vector<double> scaled(rep.samples.size());
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = rep.samples[i] / exact;
    if (law) {
        ctx.outputs["reference"] = "limit law";
        ctx.outputs["ks"] = ks_statistic(scaled, [&](double x) { return law->cdf(x); });
    } else if (t.is_root()) {
        ctx.outputs["reference"] = "Exp(1)";
        ctx.outputs["ks"] = ks_statistic(scaled, [](double x) { return -std::expm1(-x); });
    } else {
        ctx.outputs["reference"] = nullptr;
        ctx.outputs["ks"] = nullptr;
    }
    if (cfg.space == "star" && law) {
        ordered_json frac = ordered_json::array();
        const auto c = classify(ctx.net, s.branch, s.level, t.branch, t.level);
        for (double f : branch_occupancy_fractions(rep, c)) frac.push_back(f);
        ctx.outputs["branch_occupancy"] = frac;
    }
    censoring_check(ctx, rep.censored, cfg.replications);
    ctx.out.wall_seconds = rep.wall_seconds;
    ctx.out.summary = ctx.outputs["ks"].is_null() ? "simulated " + std::to_string(cfg.replications) + " replications"
                                                  : "ks=" + format_double(ctx.outputs["ks"].get<double>());
}

void cmd_starve(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto s = ctx.source();
    const int k2 = ctx.target().is_root() ? -1 : ctx.target().branch;
    if (k2 < 0) throw Error(ErrorCode::ConfigError, "starvation needs a target branch");
    if (s.is_root()) throw Error(ErrorCode::LevelOutOfRange, "starvation source must lie in a branch");
    const auto c = classify(ctx.net, s.branch, s.level, k2, 1);
    const LimitLaw law(c);
    const double mean = exact_mean_transition(ctx.net, cfg.nu, s, {k2, 1});
    const double horizon = cfg.horizon_factor * asym_mean_transition(c).at(cfg.nu);
    std::vector<double> times;
    for (double w : cfg.omega) times.push_back(w * mean);
    const auto est = estimate_starvation(ctx.net, cfg.nu, k2, times, cfg.replications, cfg.seed, s, cfg.workers);
    Csv table("omega,t,empirical,ci_lower,ci_upper,bound,beyond_horizon");
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double w = cfg.omega[i];
        const double bound = w > 0.0 ? 1.0 - law.cdf(w) : 1.0;
        const bool beyond = times[i] > horizon;
        if (beyond) ctx.warn("omega=" + format_double(w) + " lies beyond the censoring horizon");
        table.row(w, times[i], est[i].probability, est[i].ci.lower, est[i].ci.upper, bound, beyond ? 1 : 0);
        rows.push_back({{"omega", w},
                        {"t", times[i]},
                        {"empirical", est[i].probability},
                        {"ci", {est[i].ci.lower, est[i].ci.upper}},
                        {"bound", bound},
                        {"beyond_horizon", beyond}});
    }
    ctx.file("table.csv", table.str());
    ctx.outputs = {{"scenario", c.scenario}, {"exact_mean", mean}, {"horizon", horizon}, {"rows", rows}};
    ctx.out.summary = "starvation table with " + std::to_string(times.size()) + " rows";
}

void cmd_mix(Context& ctx) {
    const auto& cfg = ctx.cfg;
    Csv table("nu,kappa,phi,phi_asymptotic,phi_ratio,bound,bound_asymptotic,t_mix_exact,bound_le_exact");
    ordered_json rows = ordered_json::array();
    const bool exact_ok = cfg.exact_mix && StarSpace(ctx.net).size() <= 256;
    if (cfg.exact_mix && !exact_ok) ctx.warn("aggregated space too large for the exact mixing time; skipped");
    int kappa = -1;
    for (double nu : grid_or_nu(cfg)) {
        const auto b = mixing_lower_bound(ctx.net, nu, cfg.r, cfg.epsilon);
        kappa = b.kappa;
        const auto phi = branch_conductance(ctx.net, nu, b.kappa);
        const double phi_a = phi.asymptotic->at(nu);
        ordered_json row = {{"nu", nu},
                            {"kappa", b.kappa + 1},
                            {"phi", b.phi},
                            {"phi_asymptotic", phi_a},
                            {"phi_ratio", b.phi / phi_a},
                            {"bound", b.bound},
                            {"bound_asymptotic", b.asymptotic.at(nu)}};
        if (exact_ok) {
            const double tm = t_mix_exact(ctx.net, nu, cfg.epsilon);
            row["t_mix_exact"] = tm;
            row["bound_le_exact"] = b.bound <= tm;
            table.row(nu, b.kappa + 1, b.phi, phi_a, b.phi / phi_a, b.bound, b.asymptotic.at(nu), tm, b.bound <= tm ? 1 : 0);
        } else {
            table.row(nu, b.kappa + 1, b.phi, phi_a, b.phi / phi_a, b.bound, b.asymptotic.at(nu), "", "");
        }
        rows.push_back(row);
    }
    ctx.file("table.csv", table.str());
    ctx.outputs = {{"r", cfg.r}, {"epsilon", cfg.epsilon}, {"certification", "branch-certified"}, {"rows", rows}};
    ctx.out.summary = "kappa=" + std::to_string(kappa + 1);
}

}  // namespace

CommandOutput run_command(const std::string& name, const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    Context ctx(config);
    if (name == "classify")
        cmd_classify(ctx);
    else if (name == "mean")
        cmd_mean(ctx);
    else if (name == "law")
        cmd_law(ctx);
    else if (name == "simulate")
        cmd_simulate(ctx);
    else if (name == "starve")
        cmd_starve(ctx);
    else if (name == "mix")
        cmd_mix(ctx);
    else
        throw Error(ErrorCode::ConfigError, "unknown command '" + name + "'");

    RunConfig echo = config;
    echo.workers = 0;  // execution setting, never affects results
    ordered_json envelope = {{"command", name},
                             {"version", HCNET_VERSION},
                             {"seed", config.seed},
                             {"config", ordered_json::parse(dump_config(echo))},
                             {"outputs", ctx.outputs},
                             {"warnings", ctx.out.warnings},
                             {"exit_code", ctx.out.exit_code}};
    ctx.out.files.insert(ctx.out.files.begin(), {"report.json", envelope.dump(2) + "\n"});
    if (ctx.out.wall_seconds == 0.0)
        ctx.out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return std::move(ctx.out);
}

}  // namespace hcnet
