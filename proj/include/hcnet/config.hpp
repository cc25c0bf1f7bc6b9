#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hcnet/model.hpp"

namespace hcnet {

/// Everything a command needs. Branches and users are 1-based in the file
/// and 0-based here; levels are the same in both.
struct RunConfig {
    NetworkSpec network;
    double nu = 150.0;
    std::optional<StarState> source, target;
    /// Explicit active users (0-based, local to the branch) for full-space
    /// runs; empty means the first `level` users.
    std::vector<int> source_users, target_users;
    std::int64_t replications = 20000;
    std::uint64_t seed = 0;
    double r = 0.5;
    double epsilon = 0.1;
    std::vector<double> omega{0.25, 0.5, 1.0, 2.0};
    double delta = 0.1;
    std::vector<double> nu_grid;
    double law_max = 10.0;
    int law_points = 1001;
    int workers = 0;
    bool accelerated = true;
    /// Censoring horizon as a multiple of the asymptotic mean.
    double horizon_factor = 1e4;
    /// "star" (aggregated chain) or "full" (independent-set chain).
    std::string space = "star";
    bool exact_mix = true;
};

/// Parses the JSON config format. Unknown keys, wrong types and malformed
/// exponents raise ConfigError; the network is validated.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config(dump_config(c)) reproduces c.
std::string dump_config(const RunConfig& config);

}  // namespace hcnet
