#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fhmix {

/// A real sequence s_1, s_2, ... indexed from n = 1.
///
/// Four primitive shapes cover the spectra this library reasons about:
/// constants, power laws c*n^(-alpha), geometric sequences c*r^n and finite
/// explicit prefixes (optionally continued by an analytic tail). Sums,
/// products and quotients of sequences are closed under these shapes for the
/// purposes of convergence analysis, which is what lets variance ratios such
/// as 1 + 0.5*n^(-1) be expressed and classified exactly.
///
/// Values are immutable and cheap to copy (shared node).
class SequenceSpec {
 public:
  struct Node;

  /// Constant(0).
  SequenceSpec();

  static SequenceSpec constant(double c);
  static SequenceSpec power_law(double c, double alpha);
  static SequenceSpec geometric(double c, double r);
  static SequenceSpec sum(std::vector<SequenceSpec> terms);
  static SequenceSpec product(std::vector<SequenceSpec> factors);
  static SequenceSpec quotient(SequenceSpec numerator, SequenceSpec denominator);
  /// `tail` continues the sequence for n > values.size(); without one the
  /// sequence is only known up to its horizon.
  static SequenceSpec explicit_values(std::vector<double> values,
                                      std::optional<SequenceSpec> tail = std::nullopt);

  const Node& node() const { return *node_; }

  template <class T>
  const T* get_if() const;

  /// True when no Explicit prefix appears anywhere in the expression.
  bool is_analytic() const;

  /// Last index at which the sequence is defined, or nullopt if unbounded.
  std::optional<std::size_t> horizon() const;

  std::string describe() const;

  friend bool operator==(const SequenceSpec& a, const SequenceSpec& b);

 private:
  explicit SequenceSpec(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

namespace seq {

struct Constant {
  double c;
};
struct PowerLaw {
  double c;
  double alpha;
};
struct Geometric {
  double c;
  double r;
};
struct Sum {
  std::vector<SequenceSpec> terms;
};
struct Product {
  std::vector<SequenceSpec> factors;
};
struct Quotient {
  SequenceSpec numerator;
  SequenceSpec denominator;
};
struct Explicit {
  std::vector<double> values;
  std::optional<SequenceSpec> tail;
};

}  // namespace seq

struct SequenceSpec::Node {
  std::variant<seq::Constant, seq::PowerLaw, seq::Geometric, seq::Sum,
               seq::Product, seq::Quotient, seq::Explicit>
      value;
};

template <class T>
const T* SequenceSpec::get_if() const {
  return std::get_if<T>(&node_->value);
}

SequenceSpec operator+(const SequenceSpec& a, const SequenceSpec& b);
SequenceSpec operator-(const SequenceSpec& a, const SequenceSpec& b);
SequenceSpec operator-(const SequenceSpec& a);
SequenceSpec operator*(const SequenceSpec& a, const SequenceSpec& b);
SequenceSpec operator/(const SequenceSpec& a, const SequenceSpec& b);

/// n-th term, n >= 1. Throws IndexBeyondHorizon past an unspecified tail.
double eval_at(const SequenceSpec& s, std::size_t n);

/// Same sequence rewritten as an explicit prefix plus an analytic tail
/// (absent when the sequence has a finite horizon). Tails, here and in
/// Explicit, are indexed by the absolute position n, not by n - prefix size.
struct FlatSequence {
  std::vector<double> prefix;
  std::optional<SequenceSpec> tail;
};

FlatSequence flatten(const SequenceSpec& s);

}  // namespace fhmix
