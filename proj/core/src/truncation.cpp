#include "fhmix/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "chunks.hpp"
#include "fhmix/error.hpp"

namespace fhmix {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void require_dimension(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected a point of dimension " + std::to_string(expected) + ", got " +
                    std::to_string(got));
  }
}

}  // namespace

TruncatedGaussian TruncatedGaussian::diagonal(Eigen::VectorXd mean,
                                              Eigen::VectorXd variances) {
  if (mean.size() == 0 || mean.size() != variances.size()) {
    throw Error(ErrorCode::DimensionMismatch, "mean and variances must have equal length >= 1");
  }
  for (Eigen::Index k = 0; k < variances.size(); ++k) {
    if (!(variances[k] > 0.0) || !std::isfinite(variances[k])) {
      throw Error(ErrorCode::NonPositiveVariance,
                  "variance at coordinate " + std::to_string(k + 1) +
                      " is not a positive finite double",
                  variances[k]);
    }
  }
  TruncatedGaussian g;
  g.diagonal_ = true;
  g.mean_ = std::move(mean);
  g.variances_ = std::move(variances);
  g.std_dev_ = g.variances_.array().sqrt();
  g.inv_variances_ = g.variances_.array().inverse();
  g.log_norm_ = -0.5 * (static_cast<double>(g.mean_.size()) * kLog2Pi +
                        g.variances_.array().log().sum());
  return g;
}

TruncatedGaussian TruncatedGaussian::dense(Eigen::VectorXd mean, Eigen::MatrixXd covariance) {
  if (mean.size() == 0 || covariance.rows() != mean.size() ||
      covariance.cols() != mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "dense truncation needs a d x d covariance");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NonSpdCovariance, "Cholesky factorisation failed");
  }
  TruncatedGaussian g;
  g.diagonal_ = false;
  g.mean_ = std::move(mean);
  g.variances_ = covariance.diagonal();
  g.chol_ = llt.matrixL();
  g.log_norm_ = -0.5 * static_cast<double>(g.mean_.size()) * kLog2Pi -
                g.chol_.diagonal().array().log().sum();
  return g;
}

Eigen::MatrixXd TruncatedGaussian::covariance() const {
  if (diagonal_) return variances_.asDiagonal();
  return chol_ * chol_.transpose();
}

double TruncatedGaussian::log_density(std::span<const double> x) const {
  require_dimension(dimension(), x.size());
  const Eigen::Map<const Eigen::VectorXd> point(x.data(), mean_.size());
  if (diagonal_) {
    return log_norm_ -
           0.5 * ((point - mean_).array().square() * inv_variances_.array()).sum();
  }
  Eigen::VectorXd z = point - mean_;
  chol_.triangularView<Eigen::Lower>().solveInPlace(z);
  return log_norm_ - 0.5 * z.squaredNorm();
}

void TruncatedGaussian::draw(Engine& engine, std::normal_distribution<double>& normal,
                             std::span<double> out) const {
  const std::size_t d = dimension();
  if (diagonal_) {
    for (std::size_t k = 0; k < d; ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      out[k] = mean_[i] + std_dev_[i] * normal(engine);
    }
    return;
  }
  Eigen::VectorXd z(mean_.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = normal(engine);
  Eigen::Map<Eigen::VectorXd>(out.data(), mean_.size()) =
      mean_ + chol_.triangularView<Eigen::Lower>() * z;
}

TruncatedMixture::TruncatedMixture(std::vector<TruncatedGaussian> components,
                                   std::vector<double> weights)
    : components_(std::move(components)), weights_(std::move(weights)) {
  if (components_.empty() || components_.size() != weights_.size()) {
    throw Error(ErrorCode::InvalidArgument, "mixture needs one weight per component");
  }
  const std::size_t d = components_.front().dimension();
  double total = 0.0;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    if (components_[k].dimension() != d) {
      throw Error(ErrorCode::DimensionMismatch, "mixture components differ in dimension");
    }
    if (!(weights_[k] >= 0.0)) {
      throw Error(ErrorCode::NegativeWeight, "negative mixture weight", weights_[k]);
    }
    total += weights_[k];
    log_weights_.push_back(weights_[k] > 0.0 ? std::log(weights_[k])
                                             : -std::numeric_limits<double>::infinity());
    cumulative_.push_back(total);
  }
  if (!(total > 0.0)) throw Error(ErrorCode::WeightsNotNormalized, "weights sum to zero", total);
  for (double& c : cumulative_) c /= total;
}

TruncatedMixture::TruncatedMixture(TruncatedGaussian single)
    : TruncatedMixture(std::vector<TruncatedGaussian>{std::move(single)}, {1.0}) {}

double TruncatedMixture::log_density(std::span<const double> x) const {
  double best = -std::numeric_limits<double>::infinity();
  // Small fixed buffer; mixtures here have a handful of components.
  std::vector<double> terms(components_.size(), best);
  for (std::size_t k = 0; k < components_.size(); ++k) {
    if (weights_[k] == 0.0) continue;
    terms[k] = log_weights_[k] + components_[k].log_density(x);
    best = std::max(best, terms[k]);
  }
  if (components_.size() == 1 || !std::isfinite(best)) return best;
  double acc = 0.0;
  for (double t : terms) {
    if (std::isfinite(t)) acc += std::exp(t - best);
  }
  return best + std::log(acc);
}

std::size_t TruncatedMixture::pick_component(double u) const {
  for (std::size_t k = 0; k < cumulative_.size(); ++k) {
    if (weights_[k] > 0.0 && u < cumulative_[k]) return k;
  }
  // u rounded past the last cumulative weight: last positive component.
  for (std::size_t k = cumulative_.size(); k-- > 0;) {
    if (weights_[k] > 0.0) return k;
  }
  return 0;
}

void TruncatedMixture::draw(Engine& engine, std::normal_distribution<double>& normal,
                            std::span<double> out) const {
  const std::size_t k = components_.size() == 1 ? 0 : pick_component(uniform01(engine));
  components_[k].draw(engine, normal, out);
}

TruncatedGaussian truncate(const GaussianSpec& spec, std::size_t d) {
  if (d == 0) throw Error(ErrorCode::InvalidArgument, "truncation dimension must be >= 1");
  if (!spec.is_diagonal()) {
    if (static_cast<Eigen::Index>(d) != spec.dimension()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "dense Gaussian of dimension " + std::to_string(spec.dimension()) +
                      " cannot be truncated to " + std::to_string(d));
    }
    return TruncatedGaussian::dense(spec.mean_vector(), spec.covariance());
  }
  Eigen::VectorXd mean(static_cast<Eigen::Index>(d));
  Eigen::VectorXd var(static_cast<Eigen::Index>(d));
  for (std::size_t n = 1; n <= d; ++n) {
    const auto i = static_cast<Eigen::Index>(n - 1);
    mean[i] = eval_at(spec.mean_sequence(), n);
    var[i] = eval_at(spec.variance_sequence(), n);
  }
  return TruncatedGaussian::diagonal(std::move(mean), std::move(var));
}

TruncatedMixture truncate(const MixtureSpec& spec, std::size_t d) {
  validate_mixture(spec);
  std::vector<TruncatedGaussian> parts;
  parts.reserve(spec.size());
  for (const auto& c : spec.components) parts.push_back(truncate(c, d));
  return TruncatedMixture(std::move(parts), spec.weights);
}

double log_density(const TruncatedGaussian& g, std::span<const double> x) {
  return g.log_density(x);
}

double log_density(const TruncatedMixture& m, std::span<const double> x) {
  return m.log_density(x);
}

SampleMatrix sample(const TruncatedMixture& m, std::size_t n, std::uint64_t seed,
                    Parallelism par) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
  const std::size_t d = m.dimension();
  SampleMatrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  struct Unit {
    Unit& operator+=(const Unit&) { return *this; }
  };
  detail::reduce_chunks<Unit>(
      n, seed, par,
      [&](Engine& engine, std::normal_distribution<double>& normal, std::size_t begin,
          std::size_t end, Unit&) {
        for (std::size_t row = begin; row < end; ++row) {
          m.draw(engine, normal,
                 std::span<double>(out.row(static_cast<Eigen::Index>(row)).data(), d));
        }
      });
  return out;
}

SampleMatrix sample(const TruncatedGaussian& g, std::size_t n, std::uint64_t seed,
                    Parallelism par) {
  return sample(TruncatedMixture(g), n, seed, par);
}

bool DecisionRegionRule::contains(const TruncatedMixture& mu, const TruncatedMixture& nu,
                                  std::span<const double> x) const {
  return mu.log_density(x) >= nu.log_density(x) + tau;
}

double binomial_std_error(double p, std::size_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

namespace {

std::size_t count_inside(const DecisionRegionRule& rule, const TruncatedMixture& source,
                         const TruncatedMixture& mu, const TruncatedMixture& nu,
                         std::size_t n, std::uint64_t seed, Parallelism par) {
  const std::size_t d = source.dimension();
  return detail::reduce_chunks<std::size_t>(
      n, seed, par,
      [&](Engine& engine, std::normal_distribution<double>& normal, std::size_t begin,
          std::size_t end, std::size_t& inside) {
        std::vector<double> x(d);
        for (std::size_t row = begin; row < end; ++row) {
          source.draw(engine, normal, x);
          if (rule.contains(mu, nu, x)) ++inside;
        }
      });
}

}  // namespace

RegionMasses region_masses(const DecisionRegionRule& rule, const TruncatedMixture& mu,
                           const TruncatedMixture& nu, std::size_t n, std::uint64_t seed,
                           Parallelism par) {
  require_dimension(mu.dimension(), nu.dimension());
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
  if (!std::isfinite(rule.tau)) {
    throw Error(ErrorCode::InvalidArgument, "region threshold must be finite");
  }
  const std::size_t in_mu = count_inside(rule, mu, mu, nu, n, split_seed(seed, 0), par);
  const std::size_t in_nu = count_inside(rule, nu, mu, nu, n, split_seed(seed, 1), par);
  RegionMasses out;
  out.n = n;
  out.seed = seed;
  out.mu_mass = static_cast<double>(in_mu) / static_cast<double>(n);
  out.nu_mass = static_cast<double>(in_nu) / static_cast<double>(n);
  out.mu_std_error = binomial_std_error(out.mu_mass, n);
  out.nu_std_error = binomial_std_error(out.nu_mass, n);
  return out;
}

}  // namespace fhmix
