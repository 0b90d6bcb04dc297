#include "fhmix/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "fhmix/compensated_sum.hpp"
#include "fhmix/error.hpp"

namespace fhmix {

struct GaussianSpec::Data {
  CovarianceMode mode;
  SequenceSpec mean_seq;
  SequenceSpec variance_seq;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  Eigen::MatrixXd inverse_sqrt;
  double log_det = 0.0;
  std::vector<std::string> warnings;
};

namespace {

// Relative eigenvalue floor below which a covariance counts as degenerate.
constexpr double kEigenFloor = 1e-12;
constexpr double kSymmetryTol = 1e-12;
constexpr std::size_t kPositivityScan = 256;

void check_variance(const SequenceSpec& variance, std::vector<std::string>& warnings) {
  const FlatSequence flat = flatten(variance);
  for (std::size_t i = 0; i < flat.prefix.size(); ++i) {
    if (!(flat.prefix[i] > 0.0)) {
      throw Error(ErrorCode::NonPositiveVariance,
                  "variance at index " + std::to_string(i + 1) +
                      " is not strictly positive",
                  flat.prefix[i]);
    }
  }
  if (!flat.tail) return;
  const auto lead = leading_term(*flat.tail);
  if (!lead || !(lead->coeff > 0.0)) {
    throw Error(ErrorCode::NonPositiveVariance,
                "variance sequence " + variance.describe() +
                    " is not eventually positive");
  }
  const std::size_t start = flat.prefix.size() + 1;
  for (std::size_t n = start; n < start + kPositivityScan; ++n) {
    const double v = eval_at(*flat.tail, n);
    // Exact zeros past the start are floating-point underflow of a positive
    // analytic tail.
    if (v < 0.0 || !std::isfinite(v) || (v == 0.0 && n == start)) {
      throw Error(ErrorCode::NonPositiveVariance,
                  "variance at index " + std::to_string(n) +
                      " is not a positive finite number",
                  v);
    }
  }
  if (classify_series(variance, Transform::Identity).diverges()) {
    warnings.push_back("variance spectrum " + variance.describe() +
                       " is not summable (covariance is not trace-class)");
  }
}

void require_compatible(const GaussianSpec& gi, const GaussianSpec& gj) {
  if (gi.mode() != gj.mode()) {
    throw Error(ErrorCode::ModeMismatch,
                "cannot compare a " + std::string(to_string(gi.mode())) +
                    " Gaussian with a " + std::string(to_string(gj.mode())) +
                    " Gaussian");
  }
  if (!gi.is_diagonal() && gi.dimension() != gj.dimension()) {
    throw Error(ErrorCode::DimensionMismatch,
                "dense Gaussians of dimension " + std::to_string(gi.dimension()) +
                    " and " + std::to_string(gj.dimension()));
  }
}

// sigma_j^2 / sigma_i^2 - 1, folded to a constant where the families allow.
SequenceSpec ratio_minus_one(const SequenceSpec& vi, const SequenceSpec& vj) {
  if (vi == vj) return SequenceSpec::constant(0.0);
  if (const auto* a = vi.get_if<seq::Constant>()) {
    if (const auto* b = vj.get_if<seq::Constant>()) {
      return SequenceSpec::constant(b->c / a->c - 1.0);
    }
  }
  if (const auto* a = vi.get_if<seq::PowerLaw>()) {
    if (const auto* b = vj.get_if<seq::PowerLaw>(); b && a->alpha == b->alpha) {
      return SequenceSpec::constant(b->c / a->c - 1.0);
    }
  }
  if (const auto* a = vi.get_if<seq::Geometric>()) {
    if (const auto* b = vj.get_if<seq::Geometric>(); b && a->r == b->r) {
      return SequenceSpec::constant(b->c / a->c - 1.0);
    }
  }
  return SequenceSpec::quotient(vj - vi, vi);
}

SequenceSpec mean_difference(const SequenceSpec& mi, const SequenceSpec& mj) {
  if (mi == mj) return SequenceSpec::constant(0.0);
  if (const auto* a = mi.get_if<seq::Constant>()) {
    if (const auto* b = mj.get_if<seq::Constant>()) {
      return SequenceSpec::constant(a->c - b->c);
    }
  }
  if (const auto* b = mj.get_if<seq::Constant>(); b && b->c == 0.0) return mi;
  return mi - mj;
}

SequenceSpec as_sequence(const FlatSequence& flat) {
  if (flat.prefix.empty()) return *flat.tail;
  return SequenceSpec::explicit_values(flat.prefix, flat.tail);
}

// Bhattacharyya log-coefficient of two 1-d Gaussians.
double log_bc_coordinate(double vi, double vj, double dm) {
  const double s = vi + vj;
  const double si = std::sqrt(vi), sj = std::sqrt(vj);
  const double gap = si - sj;
  return 0.5 * std::log1p(-gap * gap / s) - dm * dm / (4.0 * s);
}

// Walks coordinates 1..d_max accumulating log-affinity; stops early when
// `stop` returns true. Returns the last coordinate visited.
std::size_t walk_log_affinity(const GaussianSpec& gi, const GaussianSpec& gj,
                              std::size_t d_max, CompensatedSum& acc,
                              const std::function<bool(double)>& stop) {
  const SequenceSpec& mi = gi.mean_sequence();
  const SequenceSpec& mj = gj.mean_sequence();
  const SequenceSpec& vi_seq = gi.variance_sequence();
  const SequenceSpec& vj_seq = gj.variance_sequence();
  for (std::size_t n = 1; n <= d_max; ++n) {
    const double vi = eval_at(vi_seq, n);
    const double vj = eval_at(vj_seq, n);
    if (!(vi > 0.0) || !(vj > 0.0) || !std::isfinite(vi) || !std::isfinite(vj)) {
      throw Error(ErrorCode::NonPositiveVariance,
                  "variance at coordinate " + std::to_string(n) +
                      " is not a positive finite double");
    }
    const double dm = eval_at(mi, n) - eval_at(mj, n);
    acc += log_bc_coordinate(vi, vj, dm);
    if (stop(acc.value())) return n;
  }
  return d_max;
}

double dense_log_affinity(const GaussianSpec& gi, const GaussianSpec& gj) {
  const Eigen::MatrixXd avg = 0.5 * (gi.covariance() + gj.covariance());
  const Eigen::LLT<Eigen::MatrixXd> llt(avg);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NonSpdCovariance, "averaged covariance is not SPD");
  }
  const Eigen::VectorXd dm = gi.mean_vector() - gj.mean_vector();
  const Eigen::VectorXd z = llt.matrixL().solve(dm);
  const double log_det_avg =
      2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -z.squaredNorm() / 8.0 - 0.5 * log_det_avg +
         0.25 * gi.log_det_covariance() + 0.25 * gj.log_det_covariance();
}

}  // namespace

std::string_view to_string(CovarianceMode mode) {
  return mode == CovarianceMode::Diagonal ? "diagonal" : "dense";
}

std::string_view to_string(SingularityReason reason) {
  return reason == SingularityReason::HilbertSchmidtViolation ? "hilbert_schmidt"
                                                              : "cameron_martin";
}

std::string_view to_string(DichotomyVerdict::Status status) {
  switch (status) {
    case DichotomyVerdict::Status::Equivalent: return "equivalent";
    case DichotomyVerdict::Status::Singular: return "singular";
    case DichotomyVerdict::Status::Undecided: return "undecided";
  }
  return "unknown";
}

GaussianSpec::GaussianSpec(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

GaussianSpec GaussianSpec::diagonal(SequenceSpec mean, SequenceSpec variance) {
  auto data = std::make_shared<Data>();
  data->mode = CovarianceMode::Diagonal;
  check_variance(variance, data->warnings);
  data->mean_seq = std::move(mean);
  data->variance_seq = std::move(variance);
  return GaussianSpec(std::move(data));
}

GaussianSpec GaussianSpec::dense(Eigen::VectorXd mean, Eigen::MatrixXd covariance) {
  const Eigen::Index d = mean.size();
  if (d == 0 || covariance.rows() != d || covariance.cols() != d) {
    throw Error(ErrorCode::DimensionMismatch,
                "dense Gaussian needs a mean of length d >= 1 and a d x d "
                "covariance");
  }
  if (!mean.allFinite() || !covariance.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "dense Gaussian entries must be finite");
  }
  const double scale = covariance.cwiseAbs().maxCoeff();
  const double asym = (covariance - covariance.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale) {
    throw Error(ErrorCode::NonSpdCovariance, "covariance is not symmetric", asym);
  }
  auto data = std::make_shared<Data>();
  data->mode = CovarianceMode::Dense;
  data->mean = std::move(mean);
  data->covariance = 0.5 * (covariance + covariance.transpose());

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(data->covariance);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::NonSpdCovariance, "eigendecomposition failed");
  }
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || lo < kEigenFloor * hi) {
    throw Error(ErrorCode::NonSpdCovariance,
                "covariance is singular or numerically degenerate", lo);
  }
  data->eigenvalues = eig.eigenvalues();
  data->eigenvectors = eig.eigenvectors();
  data->inverse_sqrt = eig.eigenvectors() *
                        eig.eigenvalues().array().rsqrt().matrix().asDiagonal() *
                        eig.eigenvectors().transpose();
  data->log_det = eig.eigenvalues().array().log().sum();
  return GaussianSpec(std::move(data));
}

CovarianceMode GaussianSpec::mode() const { return data_->mode; }

const SequenceSpec& GaussianSpec::mean_sequence() const {
  if (!is_diagonal()) throw Error(ErrorCode::ModeMismatch, "dense Gaussian has no mean sequence");
  return data_->mean_seq;
}

const SequenceSpec& GaussianSpec::variance_sequence() const {
  if (!is_diagonal()) {
    throw Error(ErrorCode::ModeMismatch, "dense Gaussian has no variance sequence");
  }
  return data_->variance_seq;
}

const Eigen::VectorXd& GaussianSpec::mean_vector() const {
  if (is_diagonal()) throw Error(ErrorCode::ModeMismatch, "diagonal Gaussian has no mean vector");
  return data_->mean;
}

const Eigen::MatrixXd& GaussianSpec::covariance() const {
  if (is_diagonal()) {
    throw Error(ErrorCode::ModeMismatch, "diagonal Gaussian has no covariance matrix");
  }
  return data_->covariance;
}

Eigen::Index GaussianSpec::dimension() const {
  if (is_diagonal()) {
    throw Error(ErrorCode::ModeMismatch, "diagonal Gaussians are infinite-dimensional");
  }
  return data_->mean.size();
}

const Eigen::VectorXd& GaussianSpec::covariance_eigenvalues() const {
  covariance();
  return data_->eigenvalues;
}

const Eigen::MatrixXd& GaussianSpec::covariance_eigenvectors() const {
  covariance();
  return data_->eigenvectors;
}

const Eigen::MatrixXd& GaussianSpec::inverse_sqrt_covariance() const {
  covariance();
  return data_->inverse_sqrt;
}

double GaussianSpec::log_det_covariance() const {
  covariance();
  return data_->log_det;
}

const std::vector<std::string>& GaussianSpec::warnings() const { return data_->warnings; }

bool operator==(const GaussianSpec& a, const GaussianSpec& b) {
  if (a.data_ == b.data_) return true;
  if (a.mode() != b.mode()) return false;
  if (a.is_diagonal()) {
    return a.data_->mean_seq == b.data_->mean_seq &&
           a.data_->variance_seq == b.data_->variance_seq;
  }
  return a.data_->mean.size() == b.data_->mean.size() &&
         a.data_->mean == b.data_->mean && a.data_->covariance == b.data_->covariance;
}

TEigenvalues t_eigenvalues(const GaussianSpec& gi, const GaussianSpec& gj) {
  require_compatible(gi, gj);
  if (gi.is_diagonal()) {
    const SequenceSpec lambda =
        ratio_minus_one(gi.variance_sequence(), gj.variance_sequence());
    return {as_sequence(flatten(lambda))};
  }
  const Eigen::MatrixXd& s = gi.inverse_sqrt_covariance();
  Eigen::MatrixXd t = s * gj.covariance() * s;
  t = 0.5 * (t + t.transpose());
  t.diagonal().array() -= 1.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t, Eigen::EigenvaluesOnly);
  std::vector<double> values(eig.eigenvalues().data(),
                             eig.eigenvalues().data() + eig.eigenvalues().size());
  std::sort(values.begin(), values.end(), std::greater<>());
  return {std::move(values)};
}

SeriesVerdict hilbert_schmidt_test(const GaussianSpec& gi, const GaussianSpec& gj) {
  const TEigenvalues lambda = t_eigenvalues(gi, gj);
  if (lambda.is_sequence()) return classify_series(lambda.sequence(), Transform::Square);
  CompensatedSum acc;
  for (double l : lambda.vector()) acc += l * l;
  SeriesVerdict v;
  v.status = SeriesVerdict::Status::Converges;
  v.limit_estimate = acc.value();
  return v;
}

SeriesVerdict cameron_martin_test(const GaussianSpec& gi, const GaussianSpec& gj) {
  require_compatible(gi, gj);
  if (gi.is_diagonal()) {
    const SequenceSpec dm = mean_difference(gi.mean_sequence(), gj.mean_sequence());
    const SequenceSpec terms =
        SequenceSpec::quotient(dm * dm, gi.variance_sequence());
    return classify_series(terms, Transform::Identity);
  }
  const Eigen::VectorXd x =
      gi.inverse_sqrt_covariance() * (gi.mean_vector() - gj.mean_vector());
  SeriesVerdict v;
  v.status = SeriesVerdict::Status::Converges;
  v.limit_estimate = x.squaredNorm();
  return v;
}

DichotomyVerdict fh_classify(const GaussianSpec& gi, const GaussianSpec& gj) {
  DichotomyVerdict v;
  v.hilbert_schmidt = hilbert_schmidt_test(gi, gj);
  v.cameron_martin = cameron_martin_test(gi, gj);
  if (v.hilbert_schmidt.diverges()) {
    v.reasons.push_back(SingularityReason::HilbertSchmidtViolation);
  }
  if (v.cameron_martin.diverges()) {
    v.reasons.push_back(SingularityReason::CameronMartinViolation);
  }
  if (!v.reasons.empty()) {
    v.status = DichotomyVerdict::Status::Singular;
  } else if (v.hilbert_schmidt.undecided() || v.cameron_martin.undecided()) {
    v.status = DichotomyVerdict::Status::Undecided;
  } else {
    v.status = DichotomyVerdict::Status::Equivalent;
  }
  if (gi.is_diagonal()) {
    const auto ratio = leading_term(
        SequenceSpec::quotient(gj.variance_sequence(), gi.variance_sequence()));
    if (ratio && !ratio->is_order_one()) {
      v.warnings.push_back(
          "variance ratio is unbounded or tends to zero; the verdict may depend "
          "on argument order");
    }
  }
  return v;
}

double log_affinity_truncated(const GaussianSpec& gi, const GaussianSpec& gj,
                              std::size_t d) {
  require_compatible(gi, gj);
  if (d == 0) throw Error(ErrorCode::InvalidArgument, "truncation dimension must be >= 1");
  if (!gi.is_diagonal()) {
    if (static_cast<Eigen::Index>(d) != gi.dimension()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "dense affinity is defined at the Gaussian's own dimension " +
                      std::to_string(gi.dimension()));
    }
    return dense_log_affinity(gi, gj);
  }
  CompensatedSum acc;
  walk_log_affinity(gi, gj, d, acc, [](double) { return false; });
  return acc.value();
}

double affinity_truncated(const GaussianSpec& gi, const GaussianSpec& gj,
                          std::size_t d) {
  const double log_a = log_affinity_truncated(gi, gj, d);
  if (log_a < kLogAffinityUnderflow) return 0.0;
  return std::min(1.0, std::exp(log_a));
}

std::optional<std::size_t> affinity_crossing_dimension(const GaussianSpec& gi,
                                                       const GaussianSpec& gj,
                                                       double threshold,
                                                       std::size_t d_max) {
  require_compatible(gi, gj);
  if (!gi.is_diagonal()) {
    throw Error(ErrorCode::ModeMismatch, "crossing search needs diagonal Gaussians");
  }
  if (!(threshold > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "threshold must be positive");
  }
  const double log_threshold = std::log(threshold);
  CompensatedSum acc;
  bool crossed = false;
  const std::size_t n = walk_log_affinity(gi, gj, d_max, acc, [&](double log_a) {
    crossed = log_a < log_threshold;
    return crossed;
  });
  if (!crossed) return std::nullopt;
  return n;
}

}  // namespace fhmix
