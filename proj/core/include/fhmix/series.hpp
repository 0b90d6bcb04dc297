#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "fhmix/sequence.hpp"

namespace fhmix {

enum class Transform { Identity, Square };

/// Asymptotic shape coeff * n^(-power) * ratio^n of a sequence's terms.
struct LeadingTerm {
  double coeff = 0.0;
  double power = 0.0;
  double ratio = 1.0;

  /// True when the terms stay bounded and bounded away from zero.
  bool is_order_one() const;
};

struct SeriesVerdict {
  enum class Status { Converges, Diverges, Undecided };

  Status status = Status::Undecided;
  /// Estimated value of the full series (Converges only).
  double limit_estimate = 0.0;
  /// Number of terms known and their sum (Undecided only).
  std::size_t horizon = 0;
  double partial_sum = 0.0;
  /// Leading behaviour of the transformed tail; absent for zero or finite
  /// sequences.
  std::optional<LeadingTerm> leading;

  bool converges() const { return status == Status::Converges; }
  bool diverges() const { return status == Status::Diverges; }
  bool undecided() const { return status == Status::Undecided; }
};

std::string_view to_string(SeriesVerdict::Status status);

/// Decides whether sum_n transform(s_n) converges.
///
/// Analytic sequences (and explicit prefixes followed by an analytic tail)
/// are decided exactly by reducing the tail to its leading term and applying
/// the p-series / geometric comparison rules. Explicit sequences without a
/// tail are never extrapolated: they yield Undecided with the sum over the
/// supplied terms.
///
/// Throws NegativeTerm under Transform::Identity if any supplied term, or
/// the eventual sign of the tail, is negative.
SeriesVerdict classify_series(const SequenceSpec& s, Transform transform);

/// sum_{k=1..n} transform(s_k) with compensated summation.
double partial_sum(const SequenceSpec& s, Transform transform, std::size_t n);

/// Leading asymptotic term of an analytic sequence; nullopt when the
/// sequence is identically zero or not analytic beyond a finite horizon.
std::optional<LeadingTerm> leading_term(const SequenceSpec& s);

/// Diagnostic only: least-squares decay exponent p in |t_n| ~ n^(-p) over the
/// second half of the known terms. Never used to change a verdict.
std::optional<double> fit_decay_exponent(const SequenceSpec& s,
                                         Transform transform);

}  // namespace fhmix
