#include "fhmix/montecarlo.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <limits>

#include "chunks.hpp"
#include "fhmix/error.hpp"

namespace fhmix {

namespace {

void require_priors(const Priors& priors) {
  for (double p : priors) {
    if (!std::isfinite(p) || p < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "priors must be non-negative", p);
    }
  }
  if (std::abs(priors[0] + priors[1] - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "priors must sum to 1", priors[0] + priors[1]);
  }
}

void require_ladder(const std::vector<std::size_t>& dims) {
  if (dims.empty()) throw Error(ErrorCode::InvalidArgument, "dimension ladder is empty");
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (dims[k] == 0 || (k > 0 && dims[k] <= dims[k - 1])) {
      throw Error(ErrorCode::InvalidArgument,
                  "dimension ladder must be strictly increasing and start at >= 1");
    }
  }
}

double safe_log(double p) {
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

Box quadrature_box(const TruncatedMixture& mu, const TruncatedMixture& nu) {
  constexpr double kHalfWidth = 12.0;
  const std::size_t d = mu.dimension();
  Box box{std::vector<double>(d, std::numeric_limits<double>::infinity()),
          std::vector<double>(d, -std::numeric_limits<double>::infinity())};
  for (const auto* m : {&mu, &nu}) {
    for (const auto& g : m->components()) {
      for (std::size_t k = 0; k < d; ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        const double s = std::sqrt(g.variances()[i]);
        box.lo[k] = std::min(box.lo[k], g.mean()[i] - kHalfWidth * s);
        box.hi[k] = std::max(box.hi[k], g.mean()[i] + kHalfWidth * s);
      }
    }
  }
  return box;
}

}  // namespace

Estimate estimate_bayes_error(const TruncatedMixture& mu, const TruncatedMixture& nu,
                              Priors priors, std::size_t n, std::uint64_t seed,
                              Parallelism par) {
  if (mu.dimension() != nu.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "mixtures differ in dimension");
  }
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
  require_priors(priors);
  const double log_prior_mu = safe_log(priors[0]);
  const double log_prior_nu = safe_log(priors[1]);
  const std::size_t d = mu.dimension();

  const std::size_t errors = detail::reduce_chunks<std::size_t>(
      n, seed, par,
      [&](Engine& engine, std::normal_distribution<double>& normal, std::size_t begin,
          std::size_t end, std::size_t& wrong) {
        std::vector<double> x(d);
        for (std::size_t row = begin; row < end; ++row) {
          const bool from_mu = uniform01(engine) < priors[0];
          (from_mu ? mu : nu).draw(engine, normal, x);
          const double score_mu =
              priors[0] > 0.0 ? log_prior_mu + mu.log_density(x)
                              : -std::numeric_limits<double>::infinity();
          const double score_nu =
              priors[1] > 0.0 ? log_prior_nu + nu.log_density(x)
                              : -std::numeric_limits<double>::infinity();
          const bool says_mu = score_mu >= score_nu;
          if (says_mu != from_mu) ++wrong;
        }
      });

  Estimate e;
  e.n = n;
  e.seed = seed;
  e.value = static_cast<double>(errors) / static_cast<double>(n);
  e.std_error = binomial_std_error(e.value, n);
  return e;
}

MixtureAffinity mixture_affinity(const MixtureSpec& mu, const MixtureSpec& nu,
                                 std::size_t d) {
  MixtureAffinity out;
  out.minimum = 1.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu.weights[i] == 0.0) continue;
    for (std::size_t j = 0; j < nu.size(); ++j) {
      if (nu.weights[j] == 0.0) continue;
      const double bc = affinity_truncated(mu.components[i], nu.components[j], d);
      out.aggregate += mu.weights[i] * nu.weights[j] * bc;
      out.upper_bound += std::sqrt(mu.weights[i] * nu.weights[j]) * bc;
      out.minimum = std::min(out.minimum, bc);
    }
  }
  out.upper_bound = std::min(1.0, out.upper_bound);
  return out;
}

std::uint64_t dimension_seed(std::uint64_t seed, std::size_t d) {
  return split_seed(seed, d);
}

SeparabilityReport separability_curve(const MixtureSpec& mu, const MixtureSpec& nu,
                                      const std::vector<std::size_t>& dims, std::size_t n,
                                      std::uint64_t seed, Parallelism par,
                                      CurveOptions options) {
  validate_mixture(mu);
  validate_mixture(nu);
  if (mu.mode() != CovarianceMode::Diagonal || nu.mode() != CovarianceMode::Diagonal) {
    throw Error(ErrorCode::ModeMismatch, "separability curves need diagonal mixtures");
  }
  require_ladder(dims);
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
  require_priors(options.priors);

  SeparabilityReport report;
  report.n = n;
  report.seed = seed;
  for (std::size_t d : dims) {
    const TruncatedMixture mu_d = truncate(mu, d);
    const TruncatedMixture nu_d = truncate(nu, d);
    SeparabilityRow row;
    row.dim = d;
    row.seed = dimension_seed(seed, d);
    row.affinity = mixture_affinity(mu, nu, d);
    row.masses = region_masses(DecisionRegionRule{options.tau}, mu_d, nu_d, n,
                               split_seed(row.seed, 0), par);
    row.bayes_error =
        estimate_bayes_error(mu_d, nu_d, options.priors, n, split_seed(row.seed, 1), par);
    report.rows.push_back(row);
  }
  return report;
}

double overlap_quadrature(const TruncatedMixture& mu, const TruncatedMixture& nu) {
  using boost::math::quadrature::gauss_kronrod;
  const std::size_t d = mu.dimension();
  if (d != nu.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "mixtures differ in dimension");
  }
  if (d > kMaxQuadratureDimension) {
    throw Error(ErrorCode::InvalidArgument,
                "overlap quadrature is limited to d <= " +
                    std::to_string(kMaxQuadratureDimension));
  }
  const Box box = quadrature_box(mu, nu);
  std::vector<double> x(d);
  auto integrand = [&]() {
    return std::exp(std::min(mu.log_density(x), nu.log_density(x)));
  };
  // The integrand has kinks on the decision boundary, so tighter relative
  // tolerances mostly buy refinement there: 1e-8 at every level with a deep
  // bisection limit resolves d = 3 to ~1e-9 in seconds.
  constexpr unsigned kDepth = 15;
  constexpr double kTolerance = 1e-8;

  std::function<double(std::size_t)> level = [&](std::size_t k) -> double {
    const double tol = kTolerance;
    auto f = [&, k](double t) {
      x[k] = t;
      return k + 1 == d ? integrand() : level(k + 1);
    };
    return gauss_kronrod<double, 15>::integrate(f, box.lo[k], box.hi[k], kDepth, tol);
  };
  return 0.5 * level(0);
}

ErrorFloorReport estimate_error_floor(const MixtureSpec& mu, const MixtureSpec& nu,
                                      const LebesgueSplit& split,
                                      const std::vector<std::size_t>& dims, std::size_t n,
                                      std::uint64_t seed, Parallelism par, Priors priors) {
  if (!(split.ac_weight > 0.0)) {
    throw Error(ErrorCode::NotMixed, "no component of nu shares support with mu",
                split.ac_weight);
  }
  validate_mixture(mu);
  validate_mixture(nu);
  require_ladder(dims);
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");

  ErrorFloorReport report;
  report.ac_weight = split.ac_weight;
  for (std::size_t d : dims) {
    const TruncatedMixture mu_d = truncate(mu, d);
    const TruncatedMixture nu_d = truncate(nu, d);
    ErrorFloorRow row;
    row.dim = d;
    row.bayes_error = estimate_bayes_error(mu_d, nu_d, priors, n,
                                           split_seed(dimension_seed(seed, d), 1), par);
    const bool equal_priors = priors[0] == 0.5 && priors[1] == 0.5;
    if (d <= kMaxQuadratureDimension && equal_priors) {
      row.overlap_quadrature = overlap_quadrature(mu_d, nu_d);
    }
    report.rows.push_back(row);
  }
  report.floor_estimate = report.rows.back().bayes_error.value;
  report.floor_std_error = report.rows.back().bayes_error.std_error;
  return report;
}

}  // namespace fhmix
