#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hcnet/config.hpp"

namespace hcnet {

struct CommandOutput {
    /// (file name, exact bytes); always contains report.json.
    std::vector<std::pair<std::string, std::string>> files;
    std::string summary;
    std::vector<std::string> warnings;
    int exit_code = 0;
    double wall_seconds = 0.0;
};

const std::vector<std::string>& command_names();

/// Runs classify | mean | law | simulate | starve | mix. Output bytes depend
/// only on the config (workers excluded). Throws Error on invalid input.
CommandOutput run_command(const std::string& name, const RunConfig& config);

/// Fixed 17-significant-digit rendering used in every CSV.
std::string format_double(double x);

}  // namespace hcnet
