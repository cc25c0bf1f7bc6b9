#pragma once

#include <stdexcept>
#include <string>

namespace hcnet {

enum class ErrorCode {
    ConfigError,
    EmptyComponent,
    NonMinimalComponent,
    AggregationInvalid,
    TooLarge,
    LevelOutOfRange,
    IllConditioned,
    DiscsOverlap,
    Unreachable,
    Singular,
    NotPowerLaw,
    SameBranch,
    InversionUnstable,
    WrongScenario,
    EmptySubset,
    FullSubset,
    NoEligibleBranch,
    BadEpsilon,
    NonConvergent,
    NumericFailure,
    CensoringOverflow,
};

const char* to_string(ErrorCode code);

/// Exit code the CLI uses for an error of this kind.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace hcnet
