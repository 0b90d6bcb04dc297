#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fhmix/sequence.hpp"
#include "fhmix/series.hpp"

namespace fhmix {

enum class CovarianceMode { Diagonal, Dense };

std::string_view to_string(CovarianceMode mode);

/// A Gaussian measure N(m, Sigma).
///
/// Diagonal mode describes a measure on sequence space whose covariance is
/// diagonal in a fixed basis shared by every measure it is compared with:
/// coordinate n has mean `mean(n)` and variance `variance(n)`.
/// Dense mode is an ordinary d-dimensional Gaussian with an SPD covariance.
class GaussianSpec {
 public:
  static GaussianSpec diagonal(SequenceSpec mean, SequenceSpec variance);
  static GaussianSpec dense(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  CovarianceMode mode() const;
  bool is_diagonal() const { return mode() == CovarianceMode::Diagonal; }

  const SequenceSpec& mean_sequence() const;
  const SequenceSpec& variance_sequence() const;

  const Eigen::VectorXd& mean_vector() const;
  const Eigen::MatrixXd& covariance() const;
  Eigen::Index dimension() const;
  /// Ascending eigenvalues and matching eigenvectors of the covariance.
  const Eigen::VectorXd& covariance_eigenvalues() const;
  const Eigen::MatrixXd& covariance_eigenvectors() const;
  const Eigen::MatrixXd& inverse_sqrt_covariance() const;
  double log_det_covariance() const;

  /// Non-fatal observations made at construction (e.g. a variance spectrum
  /// that is not summable).
  const std::vector<std::string>& warnings() const;

  friend bool operator==(const GaussianSpec& a, const GaussianSpec& b);

 private:
  struct Data;
  explicit GaussianSpec(std::shared_ptr<const Data> data);
  std::shared_ptr<const Data> data_;
};

/// Eigenvalues of T = Sigma_i^(-1/2) Sigma_j Sigma_i^(-1/2) - I: a sequence in
/// diagonal mode, a descending vector in dense mode.
struct TEigenvalues {
  std::variant<SequenceSpec, std::vector<double>> values;

  bool is_sequence() const { return values.index() == 0; }
  const SequenceSpec& sequence() const { return std::get<0>(values); }
  const std::vector<double>& vector() const { return std::get<1>(values); }
};

enum class SingularityReason { HilbertSchmidtViolation, CameronMartinViolation };

std::string_view to_string(SingularityReason reason);

struct DichotomyVerdict {
  enum class Status { Equivalent, Singular, Undecided };

  Status status = Status::Undecided;
  std::vector<SingularityReason> reasons;  // non-empty iff Singular
  SeriesVerdict hilbert_schmidt;
  SeriesVerdict cameron_martin;
  std::vector<std::string> warnings;

  bool equivalent() const { return status == Status::Equivalent; }
  bool singular() const { return status == Status::Singular; }
  bool undecided() const { return status == Status::Undecided; }
};

std::string_view to_string(DichotomyVerdict::Status status);

TEigenvalues t_eigenvalues(const GaussianSpec& gi, const GaussianSpec& gj);

/// Condition on T: sum of squared eigenvalues. Always conclusive in dense
/// mode, where the value is the squared Hilbert–Schmidt norm.
SeriesVerdict hilbert_schmidt_test(const GaussianSpec& gi, const GaussianSpec& gj);

/// Condition on the mean shift: squared Cameron–Martin norm of m_i - m_j
/// measured against Sigma_i.
SeriesVerdict cameron_martin_test(const GaussianSpec& gi, const GaussianSpec& gj);

/// Feldman–Hájek dichotomy for a pair. Both tests always run; any divergent
/// test makes the pair Singular and contributes its reason.
DichotomyVerdict fh_classify(const GaussianSpec& gi, const GaussianSpec& gj);

/// log of prod_{n<=d} of the per-coordinate Bhattacharyya coefficients. In
/// dense mode d must equal the dimension and the closed form is used.
double log_affinity_truncated(const GaussianSpec& gi, const GaussianSpec& gj,
                              std::size_t d);

/// exp(log_affinity_truncated), reported as 0 below double range.
double affinity_truncated(const GaussianSpec& gi, const GaussianSpec& gj,
                          std::size_t d);

/// Smallest d <= d_max at which the truncated affinity drops below
/// `threshold` (diagonal mode).
std::optional<std::size_t> affinity_crossing_dimension(const GaussianSpec& gi,
                                                       const GaussianSpec& gj,
                                                       double threshold,
                                                       std::size_t d_max);

/// Log-affinity below which exp() underflows to zero.
inline constexpr double kLogAffinityUnderflow = -745.0;

}  // namespace fhmix
