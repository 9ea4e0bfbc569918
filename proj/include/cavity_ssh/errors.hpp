// errors.hpp: error codes shared by every module

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cavity_ssh {

enum class ErrorCode {
    InvalidParams,
    DegenerateAtK,
    DegenerateBlock,
    NonHermitianInput,
    ConvergenceFailure,
    TruncationTooSmall,
    BasisMismatch,
    OutOfRange,
    DimensionMismatch,
    GapClosureOnGrid,
    NotChiral,
    VanishingOverlap,
    BandTrackingAmbiguous,
    ConfigInvalid,
    UnknownPreset,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::DegenerateAtK: return "DegenerateAtK";
        case ErrorCode::DegenerateBlock: return "DegenerateBlock";
        case ErrorCode::NonHermitianInput: return "NonHermitianInput";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
        case ErrorCode::BasisMismatch: return "BasisMismatch";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::GapClosureOnGrid: return "GapClosureOnGrid";
        case ErrorCode::NotChiral: return "NotChiral";
        case ErrorCode::VanishingOverlap: return "VanishingOverlap";
        case ErrorCode::BandTrackingAmbiguous: return "BandTrackingAmbiguous";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::UnknownPreset: return "UnknownPreset";
    }
    return "Unknown";
}

/// Library exception. `code()` identifies the failure; `what()` carries the
/// parameter point or field that triggered it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace cavity_ssh
