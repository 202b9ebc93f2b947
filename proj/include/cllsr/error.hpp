#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cllsr {

enum class ErrorCode {
    InvalidArgument,
    NumericalFailure,
    NotSymmetric,
    DimensionTooLarge,
    FileMissing,
    ShapeMismatch,
    ParseError,
    TooFewSamples,
    BacktrackExhausted,
    DegenerateGraph,
    EmptyClusterUnrecoverable,
    LengthMismatch,
    WriteFailure,
};

constexpr std::string_view to_string(ErrorCode code)
{
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NumericalFailure: return "NumericalFailure";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
        case ErrorCode::FileMissing: return "FileMissing";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::BacktrackExhausted: return "BacktrackExhausted";
        case ErrorCode::DegenerateGraph: return "DegenerateGraph";
        case ErrorCode::EmptyClusterUnrecoverable: return "EmptyClusterUnrecoverable";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::WriteFailure: return "WriteFailure";
    }
    return "Unknown";
}

/// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline void require(bool cond, ErrorCode code, const std::string& what)
{
    if (!cond) throw Error(code, what);
}

} // namespace cllsr
