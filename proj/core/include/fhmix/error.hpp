#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fhmix {

enum class ErrorCode {
  IndexBeyondHorizon,
  NegativeTerm,
  InvalidSequence,
  NonPositiveVariance,
  ModeMismatch,
  DimensionMismatch,
  NonSpdCovariance,
  NegativeWeight,
  WeightsNotNormalized,
  EmptyMixture,
  InconclusiveMatrix,
  NotMixed,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `value()` carries the offending
/// number where one exists (e.g. the weight sum for WeightsNotNormalized).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<double> value = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<double> value() const noexcept { return value_; }

 private:
  ErrorCode code_;
  std::optional<double> value_;
};

}  // namespace fhmix
