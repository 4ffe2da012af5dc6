#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eosvac {

enum class ErrorCode {
  NonpositiveFrequency,
  PoleCrossing,
  DegenerateResonance,
  OutOfTableRange,
  DomainError,
  NonConvergence,
  BranchViolation,
  CoincidenceRequest,
  AbsorptiveMediumUnsupported,
  GridTooCoarse,
  UnderresolvedSpectrum,
  FormatError,
  NonMonotoneDelays,
  InvalidArgument,
  ConfigError,
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonpositiveFrequency: return "NonpositiveFrequency";
    case ErrorCode::PoleCrossing: return "PoleCrossing";
    case ErrorCode::DegenerateResonance: return "DegenerateResonance";
    case ErrorCode::OutOfTableRange: return "OutOfTableRange";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::BranchViolation: return "BranchViolation";
    case ErrorCode::CoincidenceRequest: return "CoincidenceRequest";
    case ErrorCode::AbsorptiveMediumUnsupported: return "AbsorptiveMediumUnsupported";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::UnderresolvedSpectrum: return "UnderresolvedSpectrum";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::NonMonotoneDelays: return "NonMonotoneDelays";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library. The code is
/// stable and meant for programmatic dispatch; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Quadrature that ran out of subdivisions. Carries the best estimate so
/// callers can decide whether a loose answer is still usable.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& message, double best_abs_estimate, double error_bound)
      : Error(ErrorCode::NonConvergence, message),
        best_abs_estimate_(best_abs_estimate),
        error_bound_(error_bound) {}

  double best_abs_estimate() const noexcept { return best_abs_estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double best_abs_estimate_;
  double error_bound_;
};

}  // namespace eosvac
