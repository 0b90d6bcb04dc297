#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fhmix/gaussian.hpp"
#include "fhmix/mixture.hpp"
#include "fhmix/parallel.hpp"

namespace fhmix {

/// A Gaussian restricted to its first d coordinates.
class TruncatedGaussian {
 public:
  static TruncatedGaussian diagonal(Eigen::VectorXd mean, Eigen::VectorXd variances);
  static TruncatedGaussian dense(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  std::size_t dimension() const { return static_cast<std::size_t>(mean_.size()); }
  bool is_diagonal() const { return diagonal_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  /// Marginal variances (the covariance diagonal in dense mode).
  const Eigen::VectorXd& variances() const { return variances_; }
  Eigen::MatrixXd covariance() const;

  double log_density(std::span<const double> x) const;

  /// out = mean + L z with z ~ N(0, I) drawn from `normal(engine)`.
  void draw(Engine& engine, std::normal_distribution<double>& normal,
            std::span<double> out) const;

 private:
  TruncatedGaussian() = default;

  bool diagonal_ = true;
  Eigen::VectorXd mean_;
  Eigen::VectorXd variances_;
  Eigen::VectorXd std_dev_;
  Eigen::VectorXd inv_variances_;
  Eigen::MatrixXd chol_;  // lower factor, dense mode
  double log_norm_ = 0.0;
};

class TruncatedMixture {
 public:
  TruncatedMixture(std::vector<TruncatedGaussian> components, std::vector<double> weights);
  explicit TruncatedMixture(TruncatedGaussian single);

  std::size_t dimension() const { return components_.front().dimension(); }
  const std::vector<TruncatedGaussian>& components() const { return components_; }
  const std::vector<double>& weights() const { return weights_; }

  /// log sum_k w_k p_k(x); zero-weight components are skipped.
  double log_density(std::span<const double> x) const;

  /// Index of the component selected by a uniform u in [0, 1).
  std::size_t pick_component(double u) const;

  void draw(Engine& engine, std::normal_distribution<double>& normal,
            std::span<double> out) const;

 private:
  std::vector<TruncatedGaussian> components_;
  std::vector<double> weights_;
  std::vector<double> log_weights_;
  std::vector<double> cumulative_;
};

/// First d coordinates of a diagonal spec; dense specs require d to equal
/// their dimension. Throws IndexBeyondHorizon past an explicit horizon.
TruncatedGaussian truncate(const GaussianSpec& spec, std::size_t d);
TruncatedMixture truncate(const MixtureSpec& spec, std::size_t d);

double log_density(const TruncatedGaussian& g, std::span<const double> x);
double log_density(const TruncatedMixture& m, std::span<const double> x);

using SampleMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n draws, one per row. Deterministic in `seed` for any thread count.
SampleMatrix sample(const TruncatedMixture& m, std::size_t n, std::uint64_t seed,
                    Parallelism par = {});
SampleMatrix sample(const TruncatedGaussian& g, std::size_t n, std::uint64_t seed,
                    Parallelism par = {});

/// {x : log mu(x) >= log nu(x) + tau}. Ties belong to the region.
struct DecisionRegionRule {
  double tau = 0.0;

  bool contains(const TruncatedMixture& mu, const TruncatedMixture& nu,
                std::span<const double> x) const;
};

struct RegionMasses {
  double mu_mass = 0.0;
  double nu_mass = 0.0;
  double mu_std_error = 0.0;
  double nu_std_error = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

/// Monte Carlo estimate of mu(A) and nu(A) for the region A of `rule`, from
/// n draws of each measure.
RegionMasses region_masses(const DecisionRegionRule& rule, const TruncatedMixture& mu,
                           const TruncatedMixture& nu, std::size_t n, std::uint64_t seed,
                           Parallelism par = {});

/// sqrt(p (1 - p) / n).
double binomial_std_error(double p, std::size_t n);

}  // namespace fhmix
