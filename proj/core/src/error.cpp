#include "fhmix/error.hpp"

namespace fhmix {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IndexBeyondHorizon: return "index_beyond_horizon";
    case ErrorCode::NegativeTerm: return "negative_term";
    case ErrorCode::InvalidSequence: return "invalid_sequence";
    case ErrorCode::NonPositiveVariance: return "non_positive_variance";
    case ErrorCode::ModeMismatch: return "mode_mismatch";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::NonSpdCovariance: return "non_spd_covariance";
    case ErrorCode::NegativeWeight: return "negative_weight";
    case ErrorCode::WeightsNotNormalized: return "weights_not_normalized";
    case ErrorCode::EmptyMixture: return "empty_mixture";
    case ErrorCode::InconclusiveMatrix: return "inconclusive_matrix";
    case ErrorCode::NotMixed: return "not_mixed";
    case ErrorCode::InvalidArgument: return "invalid_argument";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<double> value)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      value_(value) {}

}  // namespace fhmix
