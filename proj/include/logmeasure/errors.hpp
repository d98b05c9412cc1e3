#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace logmeasure {

enum class ErrorCode {
  InvalidSpec,
  DimensionMismatch,
  NotCentrallySymmetric,
  DegenerateBall,
  NotConvex,
  SingularScaling,
  NotPolyhedral,
  UnsupportedDimension,
  NoExactPath,
  EigenFailure,
  Marginal,
  InconsistentOracles,
  NotOrthantMonotonic,
  WrongDimension,
  NotMetzler,
  NotNonnegativeDiagonal,
  BaseNotHurwitz,
  StepTooLarge,
  ParseError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotCentrallySymmetric: return "NotCentrallySymmetric";
    case ErrorCode::DegenerateBall: return "DegenerateBall";
    case ErrorCode::NotConvex: return "NotConvex";
    case ErrorCode::SingularScaling: return "SingularScaling";
    case ErrorCode::NotPolyhedral: return "NotPolyhedral";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::NoExactPath: return "NoExactPath";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::Marginal: return "Marginal";
    case ErrorCode::InconsistentOracles: return "InconsistentOracles";
    case ErrorCode::NotOrthantMonotonic: return "NotOrthantMonotonic";
    case ErrorCode::WrongDimension: return "WrongDimension";
    case ErrorCode::NotMetzler: return "NotMetzler";
    case ErrorCode::NotNonnegativeDiagonal: return "NotNonnegativeDiagonal";
    case ErrorCode::BaseNotHurwitz: return "BaseNotHurwitz";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// All library failures are reported through this exception; `code()` is the
/// machine-readable part, `what()` carries "<code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace logmeasure
