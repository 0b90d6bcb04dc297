#include <gtest/gtest.h>

#include <cmath>

#include "fhmix/error.hpp"
#include "fhmix/montecarlo.hpp"
#include "oracles.hpp"

namespace fhmix {
namespace {

using S = SequenceSpec;

TruncatedMixture single(double mean, double var) {
  return TruncatedMixture(TruncatedGaussian::diagonal(Eigen::VectorXd::Constant(1, mean),
                                                      Eigen::VectorXd::Constant(1, var)));
}

GaussianSpec unit(double shift = 0.0) {
  return GaussianSpec::diagonal(S::constant(shift), S::constant(1));
}

MixtureSpec one(const GaussianSpec& g) { return {{g}, {1.0}}; }

TEST(BayesError, IndistinguishableIsChance) {
  const Estimate e = estimate_bayes_error(single(0, 1), single(0, 1), {0.5, 0.5}, 100000, 3);
  EXPECT_LT(std::abs(e.value - 0.5), 3 * e.std_error);
  EXPECT_EQ(e.n, 100000u);
  EXPECT_EQ(e.seed, 3u);
}

TEST(BayesError, UnitShiftMatchesNormalCdf) {
  const Estimate e = estimate_bayes_error(single(0, 1), single(1, 1), {0.5, 0.5}, 1'000'000, 17);
  EXPECT_NEAR(e.value, oracle::normal_cdf(-0.5), 0.005);
  EXPECT_LT(std::abs(e.value - oracle::normal_cdf(-0.5)), 4 * e.std_error);
}

TEST(BayesError, SingleClassNeverErrs) {
  const Estimate e = estimate_bayes_error(single(0, 1), single(0, 1), {1.0, 0.0}, 10000, 3);
  EXPECT_EQ(e.value, 0.0);
}

TEST(BayesError, UnequalPriorsMatchClosedForm) {
  // Threshold x* = 1/2 + log(p0/p1) for N(0,1) vs N(1,1).
  const double p0 = 0.8, p1 = 0.2;
  const double t = 0.5 + std::log(p0 / p1);
  const double expected = p0 * oracle::normal_cdf(-t) + p1 * oracle::normal_cdf(t - 1);
  const Estimate e = estimate_bayes_error(single(0, 1), single(1, 1), {p0, p1}, 400000, 2);
  EXPECT_LT(std::abs(e.value - expected), 5 * e.std_error);
}

TEST(BayesError, Validation) {
  EXPECT_THROW(estimate_bayes_error(single(0, 1), single(0, 1), {0.6, 0.6}, 10, 1), Error);
  EXPECT_THROW(estimate_bayes_error(single(0, 1), single(0, 1), {0.5, 0.5}, 0, 1), Error);
}

TEST(BayesError, ThreadCountDoesNotMatter) {
  const Estimate a = estimate_bayes_error(single(0, 1), single(1, 2), {0.5, 0.5}, 50000, 4, {1});
  const Estimate b = estimate_bayes_error(single(0, 1), single(1, 2), {0.5, 0.5}, 50000, 4, {8});
  EXPECT_EQ(a.value, b.value);
}

TEST(MixtureAffinity, AggregateAndMinimum) {
  const MixtureSpec mu{{unit(0), unit(1)}, {0.5, 0.5}};
  const MixtureSpec nu = one(unit(0));
  const MixtureAffinity a = mixture_affinity(mu, nu, 4);
  const double bc01 = std::exp(-4.0 / 8.0);
  EXPECT_NEAR(a.aggregate, 0.5 * (1.0 + bc01), 1e-14);
  EXPECT_NEAR(a.upper_bound, std::min(1.0, std::sqrt(0.5) * (1.0 + bc01)), 1e-14);
  EXPECT_NEAR(a.minimum, bc01, 1e-14);
}

TEST(MixtureAffinity, BracketsQuadratureAndIsMonotone) {
  const MixtureSpec mu{{unit(0), unit(1)}, {0.3, 0.7}};
  const MixtureSpec nu{{unit(0.5), unit(-1)}, {0.6, 0.4}};
  const TruncatedMixture a = truncate(mu, 1), b = truncate(nu, 1);
  const double exact = oracle::integrate(
      [&](double x) {
        const double p[] = {x};
        return std::exp(0.5 * (a.log_density(p) + b.log_density(p)));
      },
      -40, 40, 1e-13, 256);
  const MixtureAffinity m = mixture_affinity(mu, nu, 1);
  EXPECT_LE(m.aggregate, exact + 1e-12);
  EXPECT_GE(m.upper_bound, exact - 1e-12);
  double prev = 1.0;
  for (std::size_t d = 1; d <= 50; ++d) {
    const double x = mixture_affinity(mu, nu, d).aggregate;
    EXPECT_LE(x, prev);
    prev = x;
  }
}

TEST(SeparabilityCurve, ConstantShiftDecreases) {
  const std::vector<std::size_t> dims{1, 10, 100, 1000};
  const SeparabilityReport r =
      separability_curve(one(unit()), one(unit(0.5)), dims, 20000, 9);
  ASSERT_EQ(r.rows.size(), 4u);
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const SeparabilityRow& row = r.rows[k];
    EXPECT_EQ(row.dim, dims[k]);
    EXPECT_NEAR(row.affinity.aggregate, std::exp(-0.03125 * dims[k]), 1e-12);
    // Bhattacharyya bound on the equal-prior error.
    EXPECT_LE(row.bayes_error.value, 0.5 * row.affinity.aggregate + 3 * row.bayes_error.std_error);
    // Closed form: error = Phi(-sqrt(d) * 0.5 / 2).
    const double exact = oracle::normal_cdf(-0.25 * std::sqrt(static_cast<double>(dims[k])));
    EXPECT_LT(std::abs(row.bayes_error.value - exact), 5 * row.bayes_error.std_error + 1e-12);
    if (k > 0) {
      const Estimate& prev = r.rows[k - 1].bayes_error;
      EXPECT_GT(prev.value - row.bayes_error.value,
                3 * std::hypot(prev.std_error, row.bayes_error.std_error));
    }
  }
}

TEST(SeparabilityCurve, IdenticalIsFlat) {
  const MixtureSpec m{{unit(0), unit(1)}, {0.5, 0.5}};
  const SeparabilityReport r = separability_curve(m, m, {1, 10, 100}, 20000, 9);
  for (const auto& row : r.rows) {
    EXPECT_LT(std::abs(row.bayes_error.value - 0.5), 3 * row.bayes_error.std_error);
  }
}

TEST(SeparabilityCurve, MixedPlateaus) {
  const MixtureSpec mu{{unit(0), unit(0.5)}, {0.5, 0.5}};
  const MixtureSpec nu{{unit(0), unit(-0.5)}, {0.5, 0.5}};
  const SeparabilityReport r = separability_curve(mu, nu, {1, 100, 1000}, 20000, 9);
  for (const auto& row : r.rows) EXPECT_GT(row.bayes_error.value, 0.1);
}

TEST(SeparabilityCurve, Validation) {
  EXPECT_THROW(separability_curve(one(unit()), one(unit()), {10, 5}, 10, 1), Error);
  EXPECT_THROW(separability_curve(one(unit()), one(unit()), {}, 10, 1), Error);
  const auto dense = GaussianSpec::dense(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
  EXPECT_THROW(separability_curve(one(dense), one(dense), {1}, 10, 1), Error);
}

TEST(SeparabilityProperties, ReseedAgreesWithinSixSe) {
  const std::vector<std::size_t> dims{1, 5, 25};
  const SeparabilityReport a = separability_curve(one(unit()), one(unit(0.3)), dims, 20000, 1);
  const SeparabilityReport b = separability_curve(one(unit()), one(unit(0.3)), dims, 20000, 2);
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const Estimate& x = a.rows[k].bayes_error;
    const Estimate& y = b.rows[k].bayes_error;
    EXPECT_LE(std::abs(x.value - y.value), 6 * std::hypot(x.std_error, y.std_error));
    EXPECT_LE(x.value, 0.5 + 3 * x.std_error);
    const RegionMasses& p = a.rows[k].masses;
    const RegionMasses& q = b.rows[k].masses;
    EXPECT_LE(std::abs(p.mu_mass - q.mu_mass), 6 * std::hypot(p.mu_std_error, q.mu_std_error));
  }
}

TEST(OverlapQuadrature, MatchesClosedForm) {
  EXPECT_NEAR(overlap_quadrature(single(0, 1), single(1, 1)), oracle::normal_cdf(-0.5), 1e-9);
  EXPECT_NEAR(overlap_quadrature(single(0, 1), single(0, 1)), 0.5, 1e-9);
  const TruncatedMixture a = truncate(one(unit()), 2), b = truncate(one(unit(1)), 2);
  EXPECT_NEAR(overlap_quadrature(a, b), oracle::normal_cdf(-std::sqrt(2.0) / 2), 1e-7);
  const TruncatedMixture c = truncate(one(unit()), 4);
  EXPECT_THROW(overlap_quadrature(c, c), Error);
}

TEST(ErrorFloor, IdenticalIsHalf) {
  const MixtureSpec m = one(unit());
  const LebesgueSplit split = lebesgue_split(m, m, dichotomy_matrix(m, m));
  const ErrorFloorReport r = estimate_error_floor(m, m, split, {1, 10}, 20000, 4);
  EXPECT_LT(std::abs(r.floor_estimate - 0.5), 3 * r.floor_std_error);
  EXPECT_DOUBLE_EQ(r.ac_weight, 1.0);
  ASSERT_TRUE(r.rows[0].overlap_quadrature);
  EXPECT_NEAR(*r.rows[0].overlap_quadrature, 0.5, 1e-9);
  EXPECT_FALSE(r.rows[1].overlap_quadrature);
}

TEST(ErrorFloor, SharedComponentFloor) {
  const MixtureSpec mu{{unit(0), unit(0.5)}, {0.5, 0.5}};
  const MixtureSpec nu{{unit(0), unit(-0.5)}, {0.5, 0.5}};
  const LebesgueSplit split = lebesgue_split(mu, nu, dichotomy_matrix(mu, nu));
  EXPECT_DOUBLE_EQ(split.ac_weight, 0.5);
  const ErrorFloorReport r =
      estimate_error_floor(mu, nu, split, {1, 2, 3, 2000}, 40000, 4);
  for (std::size_t k = 0; k < 3; ++k) {
    ASSERT_TRUE(r.rows[k].overlap_quadrature);
    const Estimate& e = r.rows[k].bayes_error;
    EXPECT_LT(std::abs(e.value - *r.rows[k].overlap_quadrature), 4 * e.std_error) << k;
  }
  // In the limit the shared half of each measure is indistinguishable and
  // the rest is perfectly separated: error -> 0.5 * 0.5 = 0.25.
  EXPECT_LT(std::abs(r.floor_estimate - 0.25), 3 * r.floor_std_error + 0.01);
}

TEST(ErrorFloor, NotMixedThrows) {
  const MixtureSpec mu = one(unit(0)), nu = one(unit(1));
  const LebesgueSplit split = lebesgue_split(mu, nu, dichotomy_matrix(mu, nu));
  try {
    estimate_error_floor(mu, nu, split, {1}, 10, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotMixed);
  }
}

TEST(AffinityErrorCoupling, SingleGaussians) {
  const GaussianSpec gi = GaussianSpec::diagonal(S::constant(0), S::power_law(1, 1));
  const GaussianSpec gj = GaussianSpec::diagonal(S::power_law(0.4, 0.5), S::power_law(1.5, 1));
  const SeparabilityReport r = separability_curve(one(gi), one(gj), {1, 4, 16, 64}, 20000, 21);
  for (const auto& row : r.rows) {
    EXPECT_LE(row.bayes_error.value,
              0.5 * affinity_truncated(gi, gj, row.dim) + 3 * row.bayes_error.std_error);
  }
}

}  // namespace
}  // namespace fhmix
