#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fhmix/error.hpp"
#include "fhmix/gaussian.hpp"
#include "oracles.hpp"

namespace fhmix {
namespace {

using S = SequenceSpec;
using Status = DichotomyVerdict::Status;

constexpr double kPiSquaredOver6 = std::numbers::pi * std::numbers::pi / 6.0;

GaussianSpec diag(S mean, S var) { return GaussianSpec::diagonal(std::move(mean), std::move(var)); }

GaussianSpec unit(S mean = S::constant(0)) { return diag(std::move(mean), S::constant(1)); }

// sqrt of the two 1-d densities integrated by adaptive Simpson.
double bc_quadrature(double mi, double vi, double mj, double vj) {
  const double lo = std::min(mi - 40 * std::sqrt(vi), mj - 40 * std::sqrt(vj));
  const double hi = std::max(mi + 40 * std::sqrt(vi), mj + 40 * std::sqrt(vj));
  return oracle::integrate(
      [&](double x) {
        return std::sqrt(oracle::normal_pdf(x, mi, vi) * oracle::normal_pdf(x, mj, vj));
      },
      lo, hi, 1e-13, 256);
}

TEST(GaussianSpec, RejectsNonPositiveVariance) {
  auto code = [](auto make) {
    try {
      make();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code([] { diag(S::constant(0), S::constant(0)); }), ErrorCode::NonPositiveVariance);
  EXPECT_EQ(code([] { diag(S::constant(0), S::power_law(-1, 1)); }),
            ErrorCode::NonPositiveVariance);
  EXPECT_EQ(code([] { diag(S::constant(0), S::explicit_values({1, 0, 1})); }),
            ErrorCode::NonPositiveVariance);
  EXPECT_EQ(code([] { diag(S::constant(0), S::constant(1) - S::power_law(2, 1)); }),
            ErrorCode::NonPositiveVariance);
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 2, 2, 1;
  EXPECT_EQ(code([&] { GaussianSpec::dense(Eigen::VectorXd::Zero(2), bad); }),
            ErrorCode::NonSpdCovariance);
  Eigen::MatrixXd asym(2, 2);
  asym << 1, 0.1, 0.2, 1;
  EXPECT_EQ(code([&] { GaussianSpec::dense(Eigen::VectorXd::Zero(2), asym); }),
            ErrorCode::NonSpdCovariance);
  EXPECT_EQ(code([] { GaussianSpec::dense(Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(2, 2)); }),
            ErrorCode::DimensionMismatch);
}

TEST(GaussianSpec, NonSummableVarianceWarns) {
  EXPECT_FALSE(unit().warnings().empty());
  EXPECT_TRUE(diag(S::constant(0), S::power_law(1, 2)).warnings().empty());
}

TEST(GaussianSpec, ModeMismatchOnAccessors) {
  const GaussianSpec g = unit();
  EXPECT_THROW(g.covariance(), Error);
  const GaussianSpec d = GaussianSpec::dense(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
  EXPECT_THROW(d.variance_sequence(), Error);
  EXPECT_THROW(fh_classify(g, d), Error);
}

TEST(TEigenvalues, Diagonal) {
  const TEigenvalues t = t_eigenvalues(unit(), diag(S::constant(0), S::constant(2)));
  ASSERT_TRUE(t.is_sequence());
  for (std::size_t n : {1u, 5u, 1000u}) EXPECT_DOUBLE_EQ(eval_at(t.sequence(), n), 1.0);
}

TEST(TEigenvalues, Dense) {
  const auto i2 = GaussianSpec::dense(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
  const auto two = GaussianSpec::dense(Eigen::VectorXd::Zero(2), 2 * Eigen::MatrixXd::Identity(2, 2));
  const TEigenvalues t = t_eigenvalues(i2, two);
  ASSERT_FALSE(t.is_sequence());
  ASSERT_EQ(t.vector().size(), 2u);
  EXPECT_NEAR(t.vector()[0], 1.0, 1e-14);
  EXPECT_NEAR(t.vector()[1], 1.0, 1e-14);

  std::mt19937_64 rng(7);
  for (int d = 2; d <= 6; ++d) {
    const Eigen::MatrixXd c = oracle::random_spd(d, rng);
    const auto g = GaussianSpec::dense(Eigen::VectorXd::Zero(d), c);
    const TEigenvalues same = t_eigenvalues(g, g);
    for (double l : same.vector()) EXPECT_NEAR(l, 0.0, 1e-10);
  }
}

TEST(HilbertSchmidt, SpecExamples) {
  EXPECT_TRUE(hilbert_schmidt_test(unit(), diag(S::constant(0), S::constant(2))).diverges());
  const SeriesVerdict v =
      hilbert_schmidt_test(unit(), diag(S::constant(0), S::constant(1) + S::power_law(1, 1)));
  ASSERT_TRUE(v.converges());
  EXPECT_NEAR(v.limit_estimate, kPiSquaredOver6, 1e-4);
  const auto i2 = GaussianSpec::dense(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
  const auto two = GaussianSpec::dense(Eigen::VectorXd::Zero(2), 2 * Eigen::MatrixXd::Identity(2, 2));
  const SeriesVerdict dv = hilbert_schmidt_test(i2, two);
  ASSERT_TRUE(dv.converges());
  EXPECT_NEAR(dv.limit_estimate, 2.0, 1e-12);
}

TEST(HilbertSchmidt, RatioOfTraceClassSpectra) {
  // sigma_j^2 / sigma_i^2 = (1 + 1/n) for spectra 1/n^2 vs (1/n^2 + 1/n^3).
  const GaussianSpec gi = diag(S::constant(0), S::power_law(1, 2));
  const GaussianSpec gj = diag(S::constant(0), S::power_law(1, 2) + S::power_law(1, 3));
  const SeriesVerdict v = hilbert_schmidt_test(gi, gj);
  ASSERT_TRUE(v.converges());
  EXPECT_NEAR(v.limit_estimate, kPiSquaredOver6, 1e-6);
  EXPECT_TRUE(hilbert_schmidt_test(gi, diag(S::constant(0), S::power_law(2, 2))).diverges());
  EXPECT_TRUE(hilbert_schmidt_test(gi, diag(S::constant(0), S::power_law(1, 2.1))).diverges());
}

TEST(CameronMartin, SpecExamples) {
  EXPECT_TRUE(cameron_martin_test(unit(), unit(S::power_law(1, 0.5))).diverges());
  const SeriesVerdict v = cameron_martin_test(unit(), unit(S::power_law(1, 1)));
  ASSERT_TRUE(v.converges());
  EXPECT_NEAR(v.limit_estimate, kPiSquaredOver6, 1e-4);
  const GaussianSpec a = diag(S::constant(0), S::power_law(1, 2));
  const SeriesVerdict z = cameron_martin_test(a, diag(S::constant(0), S::geometric(1, 0.5)));
  ASSERT_TRUE(z.converges());
  EXPECT_EQ(z.limit_estimate, 0.0);
}

TEST(CameronMartin, ScalesByVariance) {
  // dm_n = n^-2 against sigma^2 = n^-2 leaves n^-2 terms.
  const GaussianSpec gi = diag(S::constant(0), S::power_law(1, 2));
  const GaussianSpec gj = diag(S::power_law(1, 2), S::power_law(1, 2));
  const SeriesVerdict v = cameron_martin_test(gi, gj);
  ASSERT_TRUE(v.converges());
  EXPECT_NEAR(v.limit_estimate, kPiSquaredOver6, 1e-8);
  // dm_n = n^-1 against sigma^2 = n^-2 leaves constant terms.
  EXPECT_TRUE(cameron_martin_test(gi, diag(S::power_law(1, 1), S::power_law(1, 2))).diverges());
}

TEST(CameronMartin, DenseClosedForm) {
  Eigen::MatrixXd c(2, 2);
  c << 2, 0.5, 0.5, 1;
  Eigen::VectorXd m(2);
  m << 1, -1;
  const auto gi = GaussianSpec::dense(Eigen::VectorXd::Zero(2), c);
  const auto gj = GaussianSpec::dense(m, Eigen::MatrixXd::Identity(2, 2));
  const SeriesVerdict v = cameron_martin_test(gi, gj);
  ASSERT_TRUE(v.converges());
  EXPECT_NEAR(v.limit_estimate, m.dot(c.inverse() * m), 1e-12);
}

TEST(FhClassify, SpecExamples) {
  const GaussianSpec g = diag(S::power_law(1, 1), S::power_law(1, 2));
  EXPECT_TRUE(fh_classify(g, g).equivalent());

  const DichotomyVerdict hs = fh_classify(unit(), diag(S::constant(0), S::constant(2)));
  ASSERT_TRUE(hs.singular());
  EXPECT_EQ(hs.reasons, std::vector{SingularityReason::HilbertSchmidtViolation});

  const DichotomyVerdict cm = fh_classify(unit(), unit(S::constant(0.5)));
  ASSERT_TRUE(cm.singular());
  EXPECT_EQ(cm.reasons, std::vector{SingularityReason::CameronMartinViolation});
}

TEST(FhClassify, BothReasonsReported) {
  const DichotomyVerdict v = fh_classify(unit(), diag(S::constant(1), S::constant(3)));
  ASSERT_TRUE(v.singular());
  EXPECT_EQ(v.reasons.size(), 2u);
}

TEST(FhClassify, UndecidedPrefix) {
  const GaussianSpec gi = diag(S::constant(0), S::explicit_values({1, 1, 1}));
  const GaussianSpec gj = diag(S::constant(0), S::explicit_values({1.1, 1, 1}));
  const DichotomyVerdict v = fh_classify(gi, gj);
  EXPECT_TRUE(v.undecided());
  EXPECT_TRUE(v.hilbert_schmidt.undecided());
  EXPECT_EQ(v.hilbert_schmidt.horizon, 3u);
}

TEST(FhClassify, SingularDespiteUndecidedOtherTest) {
  const GaussianSpec gi = diag(S::constant(0), S::constant(1));
  const GaussianSpec gj = diag(S::explicit_values({0.1, 0.1}), S::constant(2));
  const DichotomyVerdict v = fh_classify(gi, gj);
  EXPECT_TRUE(v.singular());
  EXPECT_TRUE(v.cameron_martin.undecided());
}

TEST(FhClassify, UnboundedRatioWarns) {
  const GaussianSpec gi = diag(S::constant(0), S::power_law(1, 2));
  const GaussianSpec gj = diag(S::constant(0), S::power_law(1, 1));
  EXPECT_FALSE(fh_classify(gi, gj).warnings.empty());
  EXPECT_TRUE(fh_classify(gi, gi).warnings.empty());
}

TEST(Affinity, IdenticalIsOne) {
  const GaussianSpec g = diag(S::power_law(1, 1), S::power_law(1, 2));
  for (std::size_t d : {1u, 10u, 1000u}) EXPECT_DOUBLE_EQ(affinity_truncated(g, g, d), 1.0);
}

TEST(Affinity, OneDimensionalAgainstQuadrature) {
  const double shifted = affinity_truncated(unit(), unit(S::constant(0.5)), 1);
  EXPECT_NEAR(shifted, std::exp(-0.03125), 1e-12);
  EXPECT_NEAR(shifted, bc_quadrature(0, 1, 0.5, 1), 1e-10);
  EXPECT_NEAR(shifted, 0.96923, 1e-5);

  const double scaled = affinity_truncated(unit(), diag(S::constant(0), S::constant(2)), 1);
  EXPECT_NEAR(scaled, std::sqrt(2 * std::sqrt(2.0) / 3), 1e-12);
  EXPECT_NEAR(scaled, bc_quadrature(0, 1, 0, 2), 1e-10);
  EXPECT_NEAR(scaled, 0.97098, 1e-5);
}

TEST(Affinity, ProductOverCoordinates) {
  const GaussianSpec gi = diag(S::constant(0), S::power_law(1, 1));
  const GaussianSpec gj = diag(S::power_law(0.3, 0.5), S::power_law(1, 1) * S::geometric(1.5, 0.9));
  double expected = 1.0;
  for (std::size_t n = 1; n <= 6; ++n) {
    expected *= bc_quadrature(0, eval_at(gi.variance_sequence(), n),
                              eval_at(gj.mean_sequence(), n), eval_at(gj.variance_sequence(), n));
  }
  EXPECT_NEAR(affinity_truncated(gi, gj, 6), expected, 1e-9);
}

TEST(Affinity, DenseClosedFormAgainstQuadrature) {
  std::mt19937_64 rng(11);
  for (int d = 1; d <= 3; ++d) {
    const Eigen::MatrixXd ci = oracle::random_spd(d, rng), cj = oracle::random_spd(d, rng);
    const Eigen::VectorXd mi = Eigen::VectorXd::Random(d), mj = Eigen::VectorXd::Random(d);
    const double quad = oracle::bhattacharyya_quadrature(mi, ci, mj, cj, 24);
    const double a = affinity_truncated(GaussianSpec::dense(mi, ci), GaussianSpec::dense(mj, cj), d);
    EXPECT_NEAR(a, quad, 1e-8) << d;
  }
  const auto g = GaussianSpec::dense(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
  EXPECT_THROW(affinity_truncated(g, g, 3), Error);
}

TEST(Affinity, UnderflowReportsZero) {
  const double a = affinity_truncated(unit(), unit(S::constant(0.5)), 100000);
  EXPECT_EQ(a, 0.0);
  EXPECT_NEAR(log_affinity_truncated(unit(), unit(S::constant(0.5)), 100000), -3125.0, 1e-8);
}

TEST(Affinity, CrossingDimension) {
  // Each coordinate contributes -1/32 to the log-affinity.
  const auto d = affinity_crossing_dimension(unit(), unit(S::constant(0.5)), 1e-6, 100000);
  ASSERT_TRUE(d);
  EXPECT_EQ(*d, static_cast<std::size_t>(std::floor(32 * std::log(1e6))) + 1);
  EXPECT_FALSE(affinity_crossing_dimension(unit(), unit(S::power_law(1, 1)), 1e-6, 1000));
}

// Random pairs from the supported diagonal families.
GaussianSpec random_diagonal(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 2.5);
  std::mt19937_64::result_type pick = rng() % 3;
  S var = pick == 0 ? S::constant(u(rng)) : pick == 1 ? S::power_law(u(rng), u(rng)) : S::geometric(u(rng), 0.3 + 0.3 * u(rng) / 2.5);
  pick = rng() % 4;
  S mean = pick == 0 ? S::constant(0) : pick == 1 ? S::power_law(u(rng), u(rng)) : pick == 2 ? S::geometric(u(rng), 0.5) : S::constant(u(rng));
  return diag(mean, var);
}

GaussianSpec perturb(const GaussianSpec& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 0.9);
  const std::mt19937_64::result_type pick = rng() % 3;
  const S p = pick == 0 ? S::constant(u(rng)) : pick == 1 ? S::power_law(u(rng), 2 * u(rng)) : S::geometric(u(rng), u(rng));
  const S shift = rng() % 2 ? S::constant(0) : S::power_law(u(rng), 2 * u(rng)) * g.variance_sequence();
  return diag(g.mean_sequence() + shift, g.variance_sequence() * (S::constant(1) + p));
}

TEST(GaussianProperties, SymmetryAndAffinityBounds) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const GaussianSpec gi = random_diagonal(rng);
    const GaussianSpec gj = perturb(gi, rng);
    const DichotomyVerdict a = fh_classify(gi, gj), b = fh_classify(gj, gi);
    ASSERT_EQ(a.status, b.status) << trial;
    ASSERT_NE(a.status, Status::Undecided);
    double prev = 1.0;
    for (std::size_t d = 1; d <= 64; ++d) {
      const double x = affinity_truncated(gi, gj, d);
      ASSERT_GE(x, 0.0);
      ASSERT_LE(x, prev);
      prev = x;
    }
    EXPECT_EQ(affinity_truncated(gi, gj, 17), affinity_truncated(gi, gj, 17));
  }
}

}  // namespace
}  // namespace fhmix
