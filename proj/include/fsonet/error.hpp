#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fsonet {

enum class ErrorCode {
    // orbit
    ChecksumMismatch,
    FormatError,
    EccentricityDomain,
    // passes
    WindowTooLarge,
    InvalidThreshold,
    InvalidWindow,
    // weather
    SchemaError,
    ValueError,
    TimeOrderError,
    OutOfCoverage,
    OutOfSpan,
    // linkbudget
    DomainError,
    // analysis
    NoOverlap,
    SpecMismatch,
    DegenerateSeries,
    // scenario
    ConfigError,
    MissingKey,
    UnitError,
    SpanMismatch,
    // output
    EmptySeries,
    IoError,
    InvariantViolation,
};

std::string_view error_code_name(ErrorCode code);

/// Single exception type for the library. The code identifies the failure
/// class; the message carries location details (file, line, key, column).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Error raised while parsing a TLE line; carries the 1-based line number
/// within the element set and the 1-based inclusive column range.
class TleError : public Error {
public:
    TleError(ErrorCode code, int line, int first_column, int last_column, const std::string& detail);

    int line() const noexcept { return line_; }
    int first_column() const noexcept { return first_column_; }
    int last_column() const noexcept { return last_column_; }

private:
    int line_;
    int first_column_;
    int last_column_;
};

}  // namespace fsonet
