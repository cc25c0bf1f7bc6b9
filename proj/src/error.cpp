#include "hcnet/error.hpp"

namespace hcnet {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::EmptyComponent: return "EmptyComponent";
        case ErrorCode::NonMinimalComponent: return "NonMinimalComponent";
        case ErrorCode::AggregationInvalid: return "AggregationInvalid";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
        case ErrorCode::IllConditioned: return "IllConditioned";
        case ErrorCode::DiscsOverlap: return "DiscsOverlap";
        case ErrorCode::Unreachable: return "Unreachable";
        case ErrorCode::Singular: return "Singular";
        case ErrorCode::NotPowerLaw: return "NotPowerLaw";
        case ErrorCode::SameBranch: return "SameBranch";
        case ErrorCode::InversionUnstable: return "InversionUnstable";
        case ErrorCode::WrongScenario: return "WrongScenario";
        case ErrorCode::EmptySubset: return "EmptySubset";
        case ErrorCode::FullSubset: return "FullSubset";
        case ErrorCode::NoEligibleBranch: return "NoEligibleBranch";
        case ErrorCode::BadEpsilon: return "BadEpsilon";
        case ErrorCode::NonConvergent: return "NonConvergent";
        case ErrorCode::NumericFailure: return "NumericFailure";
        case ErrorCode::CensoringOverflow: return "CensoringOverflow";
    }
    return "UnknownError";
}

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::IllConditioned:
        case ErrorCode::DiscsOverlap:
        case ErrorCode::Singular:
        case ErrorCode::InversionUnstable:
        case ErrorCode::NonConvergent:
        case ErrorCode::NumericFailure:
            return 3;
        case ErrorCode::CensoringOverflow:
            return 4;
        default:
            return 2;
    }
}

}  // namespace hcnet
