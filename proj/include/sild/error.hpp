#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sild {

enum class ErrorCode {
    NonAscendingFrequency,
    MalformedRecord,
    UnsupportedPortCount,
    UnsupportedFeature,
    NumericOverflow,
    ZeroMagnitudeSample,
    GridMismatch,
    InsufficientBandwidth,
    EmptyBand,
    NonUniformGrid,
    PassivityViolation,
    InvalidArgument,
    EmptyInput,
    Io,
};

inline const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::NonAscendingFrequency: return "NonAscendingFrequency";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::UnsupportedPortCount: return "UnsupportedPortCount";
    case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::NumericOverflow: return "NumericOverflow";
    case ErrorCode::ZeroMagnitudeSample: return "ZeroMagnitudeSample";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InsufficientBandwidth: return "InsufficientBandwidth";
    case ErrorCode::EmptyBand: return "EmptyBand";
    case ErrorCode::NonUniformGrid: return "NonUniformGrid";
    case ErrorCode::PassivityViolation: return "PassivityViolation";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message)
    {
    }

    ErrorCode code() const noexcept { return code_; }
    /// Message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

/// Non-fatal diagnostics attached to results (bridged nulls, resampling, ...).
using Warnings = std::vector<std::string>;

inline void append(Warnings& into, const Warnings& from)
{
    into.insert(into.end(), from.begin(), from.end());
}

} // namespace sild
