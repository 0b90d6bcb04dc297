#include "fhmix/mixture.hpp"

#include <algorithm>
#include <cmath>

#include "fhmix/compensated_sum.hpp"
#include "fhmix/error.hpp"

namespace fhmix {

CovarianceMode MixtureSpec::mode() const {
  if (components.empty()) throw Error(ErrorCode::EmptyMixture, "mixture has no components");
  return components.front().mode();
}

MixtureValidation validate_mixture(const MixtureSpec& m) {
  if (m.components.empty()) {
    throw Error(ErrorCode::EmptyMixture, "mixture has no components");
  }
  if (m.weights.size() != m.components.size()) {
    throw Error(ErrorCode::InvalidArgument,
                std::to_string(m.weights.size()) + " weights for " +
                    std::to_string(m.components.size()) + " components");
  }
  MixtureValidation out;
  CompensatedSum total;
  for (std::size_t k = 0; k < m.weights.size(); ++k) {
    const double w = m.weights[k];
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::NegativeWeight,
                  "weight " + std::to_string(k) + " is negative or not finite", w);
    }
    if (w == 0.0) out.zero_weight_components.push_back(k);
    total += w;
  }
  if (std::abs(total.value() - 1.0) > kWeightSumTolerance) {
    throw Error(ErrorCode::WeightsNotNormalized, "weights sum to " + std::to_string(total.value()),
                total.value());
  }
  const CovarianceMode mode = m.components.front().mode();
  for (std::size_t k = 1; k < m.components.size(); ++k) {
    const GaussianSpec& g = m.components[k];
    if (g.mode() != mode) {
      throw Error(ErrorCode::ModeMismatch,
                  "component " + std::to_string(k) + " is " +
                      std::string(to_string(g.mode())) + ", component 0 is " +
                      std::string(to_string(mode)));
    }
    if (mode == CovarianceMode::Dense &&
        g.dimension() != m.components.front().dimension()) {
      throw Error(ErrorCode::ModeMismatch,
                  "component " + std::to_string(k) + " has dimension " +
                      std::to_string(g.dimension()));
    }
  }
  for (std::size_t k : out.zero_weight_components) {
    out.warnings.push_back("component " + std::to_string(k) + " has zero weight");
  }
  for (std::size_t k = 0; k < m.components.size(); ++k) {
    for (const auto& w : m.components[k].warnings()) {
      out.warnings.push_back("component " + std::to_string(k) + ": " + w);
    }
  }
  return out;
}

DichotomyMatrix::DichotomyMatrix(std::size_t rows, std::size_t cols,
                                 std::vector<DichotomyVerdict> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {
  if (cells_.size() != rows_ * cols_) {
    throw Error(ErrorCode::InvalidArgument, "dichotomy matrix is incomplete");
  }
}

const DichotomyVerdict& DichotomyMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) throw Error(ErrorCode::InvalidArgument, "cell out of range");
  return cells_[i * cols_ + j];
}

bool DichotomyMatrix::any(DichotomyVerdict::Status status) const {
  return std::any_of(cells_.begin(), cells_.end(),
                     [&](const auto& c) { return c.status == status; });
}

bool DichotomyMatrix::all(DichotomyVerdict::Status status) const {
  return std::all_of(cells_.begin(), cells_.end(),
                     [&](const auto& c) { return c.status == status; });
}

std::vector<std::pair<std::size_t, std::size_t>> DichotomyMatrix::cells_with(
    DichotomyVerdict::Status status) const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      if (at(i, j).status == status) out.emplace_back(i, j);
    }
  }
  return out;
}

DichotomyMatrix dichotomy_matrix(const MixtureSpec& mu, const MixtureSpec& nu) {
  validate_mixture(mu);
  validate_mixture(nu);
  if (mu.mode() != nu.mode()) {
    throw Error(ErrorCode::ModeMismatch, "mixtures use different covariance modes");
  }
  std::vector<DichotomyVerdict> cells;
  cells.reserve(mu.size() * nu.size());
  for (const auto& gi : mu.components) {
    for (const auto& gj : nu.components) cells.push_back(fh_classify(gi, gj));
  }
  return DichotomyMatrix(mu.size(), nu.size(), std::move(cells));
}

LebesgueSplit lebesgue_split(const MixtureSpec& mu, const MixtureSpec& nu,
                             const DichotomyMatrix& matrix) {
  if (matrix.rows() != mu.size() || matrix.cols() != nu.size()) {
    throw Error(ErrorCode::DimensionMismatch, "matrix shape does not match the mixtures");
  }
  if (matrix.any(DichotomyVerdict::Status::Undecided)) {
    throw Error(ErrorCode::InconclusiveMatrix,
                "Lebesgue split needs every cell to be conclusive");
  }
  LebesgueSplit split;
  CompensatedSum ac, s;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    bool shares_support = false;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      shares_support = shares_support || matrix.at(i, j).equivalent();
    }
    if (shares_support) {
      split.ac_indices.push_back(j);
      ac += nu.weights[j];
    } else {
      split.s_indices.push_back(j);
      s += nu.weights[j];
    }
  }
  split.ac_weight = ac.value();
  split.s_weight = s.value();
  return split;
}

std::string_view to_string(MixtureVerdict::Status status) {
  switch (status) {
    case MixtureVerdict::Status::Singular: return "singular";
    case MixtureVerdict::Status::Mixed: return "mixed";
    case MixtureVerdict::Status::Undecided: return "undecided";
  }
  return "unknown";
}

MixtureVerdict mixture_dichotomy(const MixtureSpec& mu, const MixtureSpec& nu,
                                 const DichotomyMatrix& matrix) {
  MixtureVerdict v;
  v.undecided_cells = matrix.cells_with(DichotomyVerdict::Status::Undecided);
  if (matrix.all(DichotomyVerdict::Status::Singular)) {
    v.status = MixtureVerdict::Status::Singular;
  } else if (matrix.any(DichotomyVerdict::Status::Equivalent)) {
    v.status = MixtureVerdict::Status::Mixed;
    if (v.undecided_cells.empty()) v.split = lebesgue_split(mu, nu, matrix);
  } else {
    v.status = MixtureVerdict::Status::Undecided;
  }
  return v;
}

MixtureVerdict mixture_dichotomy(const MixtureSpec& mu, const MixtureSpec& nu) {
  return mixture_dichotomy(mu, nu, dichotomy_matrix(mu, nu));
}

}  // namespace fhmix
