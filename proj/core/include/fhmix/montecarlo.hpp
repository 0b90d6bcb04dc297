#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "fhmix/mixture.hpp"
#include "fhmix/parallel.hpp"
#include "fhmix/truncation.hpp"

namespace fhmix {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

using Priors = std::array<double, 2>;

/// Misclassification rate of the maximum-posterior rule on n labelled draws
/// (label ~ priors, point ~ the labelled measure). Ties go to mu.
Estimate estimate_bayes_error(const TruncatedMixture& mu, const TruncatedMixture& nu,
                              Priors priors, std::size_t n, std::uint64_t seed,
                              Parallelism par = {});

/// Bhattacharyya affinities between the components of two mixtures at
/// truncation d. The mixtures' own affinity BC(mu, nu) is bracketed by
///   aggregate   = sum_ij pi_i rho_j BC_ij            (joint concavity)
///   upper_bound = min(1, sum_ij sqrt(pi_i rho_j) BC_ij)
/// and `minimum` = min_ij BC_ij over positive-weight pairs.
struct MixtureAffinity {
  double aggregate = 0.0;
  double upper_bound = 0.0;
  double minimum = 0.0;
};

MixtureAffinity mixture_affinity(const MixtureSpec& mu, const MixtureSpec& nu, std::size_t d);

struct CurveOptions {
  double tau = 0.0;
  Priors priors{0.5, 0.5};
};

struct SeparabilityRow {
  std::size_t dim = 0;
  MixtureAffinity affinity;
  RegionMasses masses;
  Estimate bayes_error;
  std::uint64_t seed = 0;  // row seed; masses and Bayes error derive from it
};

struct SeparabilityReport {
  std::vector<SeparabilityRow> rows;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

/// Per-dimension seed used by the curve and the error-floor report.
std::uint64_t dimension_seed(std::uint64_t seed, std::size_t d);

/// Affinity, region masses and Bayes error for each d of a strictly
/// increasing ladder. Diagonal mode only.
SeparabilityReport separability_curve(const MixtureSpec& mu, const MixtureSpec& nu,
                                      const std::vector<std::size_t>& dims, std::size_t n,
                                      std::uint64_t seed, Parallelism par = {},
                                      CurveOptions options = {});

/// Largest dimension handled by overlap_quadrature.
inline constexpr std::size_t kMaxQuadratureDimension = 3;

/// (1/2) * integral of min(p_mu, p_nu): the equal-prior Bayes error, by
/// nested adaptive Gauss–Kronrod over +-12 standard deviations of every
/// component. d <= 3.
double overlap_quadrature(const TruncatedMixture& mu, const TruncatedMixture& nu);

struct ErrorFloorRow {
  std::size_t dim = 0;
  Estimate bayes_error;
  std::optional<double> overlap_quadrature;
};

struct ErrorFloorReport {
  double ac_weight = 0.0;
  std::vector<ErrorFloorRow> rows;
  double floor_estimate = 0.0;
  double floor_std_error = 0.0;
};

/// Bayes error along the ladder for a mixed pair; the floor is the estimate
/// at the largest dimension. Throws NotMixed when split.ac_weight == 0.
/// Uses the same per-dimension seeds as separability_curve.
ErrorFloorReport estimate_error_floor(const MixtureSpec& mu, const MixtureSpec& nu,
                                      const LebesgueSplit& split,
                                      const std::vector<std::size_t>& dims, std::size_t n,
                                      std::uint64_t seed, Parallelism par = {},
                                      Priors priors = {0.5, 0.5});

}  // namespace fhmix
