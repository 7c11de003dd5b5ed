#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace relfit {

enum class ErrorCode {
    NonBinaryEntry,
    ZeroColumn,
    RankDeficient,
    DimensionMismatch,
    ZeroData,
    EmptySet,
    FullSet,
    TooLarge,
    SupportViolation,
    NotInVariety,
    MaxItersExceeded,
    InvalidGamma,
    ZeroMargin,
    BracketFailure,
    EmptyReducedModel,
    RankDeficientReduced,
    InvalidConfig,
    NotNormalized,
    ParseError,
    LengthMismatch,
    NegativeCount,
    AllZero,
    IoError,
};

inline std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::NonBinaryEntry: return "NonBinaryEntry";
    case ErrorCode::ZeroColumn: return "ZeroColumn";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroData: return "ZeroData";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::FullSet: return "FullSet";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::NotInVariety: return "NotInVariety";
    case ErrorCode::MaxItersExceeded: return "MaxItersExceeded";
    case ErrorCode::InvalidGamma: return "InvalidGamma";
    case ErrorCode::ZeroMargin: return "ZeroMargin";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::EmptyReducedModel: return "EmptyReducedModel";
    case ErrorCode::RankDeficientReduced: return "RankDeficientReduced";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NegativeCount: return "NegativeCount";
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/** Base exception for every failure raised by the library. */
class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/**
 * Raised when an iterative routine runs out of its iteration budget, or
 * when bisection cannot bracket the adjustment factor. Carries the last
 * iterate so callers can inspect how far the fit got.
 */
class ConvergenceError : public Error
{
public:
    ConvergenceError(ErrorCode code, const std::string& what,
                     std::vector<double> last_iterate, double residual)
        : Error(code, what), last_iterate_(std::move(last_iterate)), residual_(residual) {}

    const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
    double residual() const noexcept { return residual_; }

private:
    std::vector<double> last_iterate_;
    double residual_;
};

} // namespace relfit
