#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ylab {

enum class ErrorCode {
  DimensionMismatch,
  NonFiniteResult,
  LambdaInSpectrum,
  SingularPrefactor,
  UnboundedModel,
  NonlinearModel,
  InvalidArgument,
  GridTooShort,
  NonConvergentYosidaLimit,
  StepSizeTooCoarse,
  NotHyperbolic,
  BaseNotHyperbolic,
  IllConditionedSplit,
  NewtonDiverged,
  JacobianSingular,
  JacobianUnavailable,
  GapTooSmall,
  NotConverged,
  ParseError,
  CheckFailure,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteResult: return "NonFiniteResult";
    case ErrorCode::LambdaInSpectrum: return "LambdaInSpectrum";
    case ErrorCode::SingularPrefactor: return "SingularPrefactor";
    case ErrorCode::UnboundedModel: return "UnboundedModel";
    case ErrorCode::NonlinearModel: return "NonlinearModel";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::GridTooShort: return "GridTooShort";
    case ErrorCode::NonConvergentYosidaLimit: return "NonConvergentYosidaLimit";
    case ErrorCode::StepSizeTooCoarse: return "StepSizeTooCoarse";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::BaseNotHyperbolic: return "BaseNotHyperbolic";
    case ErrorCode::IllConditionedSplit: return "IllConditionedSplit";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::JacobianSingular: return "JacobianSingular";
    case ErrorCode::JacobianUnavailable: return "JacobianUnavailable";
    case ErrorCode::GapTooSmall: return "GapTooSmall";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::CheckFailure: return "CheckFailure";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) throw Error(code, what);
}

}  // namespace ylab
