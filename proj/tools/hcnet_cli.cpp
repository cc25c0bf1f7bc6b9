#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hcnet/commands.hpp"
#include "hcnet/config.hpp"
#include "hcnet/error.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<double> nu;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> reps;
    std::optional<int> workers;
    std::string out = "out";
};

int run(const std::string& command, const Overrides& o) {
    auto cfg = hcnet::load_config(o.config);
    if (o.nu) {
        if (!(*o.nu > 0.0)) throw hcnet::Error(hcnet::ErrorCode::ConfigError, "--nu must be positive");
        cfg.nu = *o.nu;
    }
    if (o.seed) cfg.seed = *o.seed;
    if (o.reps) {
        if (*o.reps < 1) throw hcnet::Error(hcnet::ErrorCode::ConfigError, "--reps must be positive");
        cfg.replications = *o.reps;
    }
    if (o.workers) cfg.workers = *o.workers;

    const auto result = hcnet::run_command(command, cfg);
    std::filesystem::create_directories(o.out);
    for (const auto& [name, bytes] : result.files) {
        const auto path = std::filesystem::path(o.out) / name;
        std::ofstream f(path, std::ios::binary);
        f << bytes;
        if (!f) throw hcnet::Error(hcnet::ErrorCode::ConfigError, "cannot write " + path.string());
    }
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    std::cerr << "wall time: " << result.wall_seconds << " s\n";
    std::cout << command << ": " << result.summary << '\n';
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hitting times, limit laws, starvation and mixing on hard-core random-access networks"};
    app.set_version_flag("--version", std::string(HCNET_VERSION));
    app.require_subcommand(1);

    Overrides o;
    std::string chosen;
    for (const auto& name : hcnet::command_names()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", o.config, "config file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--nu", o.nu, "scaling parameter");
        sub->add_option("--seed", o.seed, "RNG seed");
        sub->add_option("--reps", o.reps, "replications");
        sub->add_option("--out", o.out, "output directory")->capture_default_str();
        sub->add_option("--workers", o.workers, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
        sub->callback([&chosen, name] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return run(chosen, o);
    } catch (const hcnet::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return hcnet::exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
