#pragma once

#include <stdexcept>
#include <string>

namespace saddle {

enum class ErrorCode {
  NotSymmetric,
  NotPositiveDefinite,
  DimensionMismatch,
  SingularSchur,
  ZeroData,
  RankDeficientProlongation,
  NotInfSupDiscrete,
  TrivialProjection,
  SpecInvalid,
  NonNestedLevels,
  ParseError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularSchur: return "SingularSchur";
    case ErrorCode::ZeroData: return "ZeroData";
    case ErrorCode::RankDeficientProlongation: return "RankDeficientProlongation";
    case ErrorCode::NotInfSupDiscrete: return "NotInfSupDiscrete";
    case ErrorCode::TrivialProjection: return "TrivialProjection";
    case ErrorCode::SpecInvalid: return "SpecInvalid";
    case ErrorCode::NonNestedLevels: return "NonNestedLevels";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// All library failures are reported through this type; `code()` names the
/// violated precondition.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace saddle
