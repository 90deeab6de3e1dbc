#include "fsonet/error.hpp"

namespace fsonet {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::EccentricityDomain: return "EccentricityDomain";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ValueError: return "ValueError";
    case ErrorCode::TimeOrderError: return "TimeOrderError";
    case ErrorCode::OutOfCoverage: return "OutOfCoverage";
    case ErrorCode::OutOfSpan: return "OutOfSpan";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::SpecMismatch: return "SpecMismatch";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::UnitError: return "UnitError";
    case ErrorCode::SpanMismatch: return "SpanMismatch";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

TleError::TleError(ErrorCode code, int line, int first_column, int last_column, const std::string& detail)
    : Error(code, "TLE line " + std::to_string(line) + ", columns " + std::to_string(first_column) + "-" +
                      std::to_string(last_column) + ": " + detail),
      line_(line),
      first_column_(first_column),
      last_column_(last_column) {}

}  // namespace fsonet
