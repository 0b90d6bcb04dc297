#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "fhmix/gaussian.hpp"

namespace fhmix {

/// Finitely presented mixture sum_k weights[k] * components[k].
struct MixtureSpec {
  std::vector<GaussianSpec> components;
  std::vector<double> weights;

  std::size_t size() const { return components.size(); }
  CovarianceMode mode() const;

  friend bool operator==(const MixtureSpec&, const MixtureSpec&) = default;
};

/// Absolute tolerance on |sum(weights) - 1|.
inline constexpr double kWeightSumTolerance = 1e-12;

struct MixtureValidation {
  std::vector<std::size_t> zero_weight_components;
  std::vector<std::string> warnings;
};

/// Checks the probability-measure hypotheses: non-negative weights summing
/// to one and a single shared mode (and dimension, for dense components).
/// Zero-weight components are kept and reported.
MixtureValidation validate_mixture(const MixtureSpec& m);

class DichotomyMatrix {
 public:
  DichotomyMatrix(std::size_t rows, std::size_t cols, std::vector<DichotomyVerdict> cells);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const DichotomyVerdict& at(std::size_t i, std::size_t j) const;

  bool any(DichotomyVerdict::Status status) const;
  bool all(DichotomyVerdict::Status status) const;
  std::vector<std::pair<std::size_t, std::size_t>> cells_with(
      DichotomyVerdict::Status status) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<DichotomyVerdict> cells_;
};

/// Cell (i, j) is fh_classify(mu.components[i], nu.components[j]).
DichotomyMatrix dichotomy_matrix(const MixtureSpec& mu, const MixtureSpec& nu);

/// nu = nu_ac + nu_s relative to mu. Component j of nu is absolutely
/// continuous when it is equivalent to some component of mu and singular
/// when it is singular to all of them.
struct LebesgueSplit {
  std::vector<std::size_t> ac_indices;
  std::vector<std::size_t> s_indices;
  double ac_weight = 0.0;
  double s_weight = 0.0;
};

LebesgueSplit lebesgue_split(const MixtureSpec& mu, const MixtureSpec& nu,
                             const DichotomyMatrix& matrix);

struct MixtureVerdict {
  enum class Status { Singular, Mixed, Undecided };

  Status status = Status::Undecided;
  /// Present for Mixed when every cell is conclusive.
  std::optional<LebesgueSplit> split;
  /// Undecided cells, reported for Undecided and for a Mixed verdict that
  /// was forced by an Equivalent cell despite them.
  std::vector<std::pair<std::size_t, std::size_t>> undecided_cells;
};

std::string_view to_string(MixtureVerdict::Status status);

MixtureVerdict mixture_dichotomy(const MixtureSpec& mu, const MixtureSpec& nu,
                                 const DichotomyMatrix& matrix);
MixtureVerdict mixture_dichotomy(const MixtureSpec& mu, const MixtureSpec& nu);

}  // namespace fhmix
