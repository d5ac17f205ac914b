#include <gtest/gtest.h>

#include <cmath>

#include "mdl/typical_set.hpp"

using namespace mdl;

TEST(IsTypical, ExactMeanSquaresAndBoundary) {
  // Columns with mean square exactly Σ_jj.
  Eigen::MatrixXd x(4, 2);
  x << 1, 2, -1, 2, 1, -2, -1, -2;
  const Eigen::Vector2d diag(1.0, 4.0);
  EXPECT_TRUE(is_typical(x, diag, 1e-12));
  // Ratio exactly 1 + ε is still typical; the interval is closed.
  Eigen::MatrixXd b(4, 1);
  b << 1, 1, 1, 3;  // mean square 3
  EXPECT_TRUE(is_typical(b, Eigen::VectorXd::Constant(1, 2.0), 0.5));
  EXPECT_TRUE(is_typical(b, Eigen::VectorXd::Constant(1, 6.0), 0.5));
  // Mean square (1 + 2ε)Σ_jj is not.
  EXPECT_FALSE(is_typical(b, Eigen::VectorXd::Constant(1, 1.5), 0.5));
  EXPECT_FALSE(is_typical(x, Eigen::Vector2d(2.0, 4.0), 0.3));
  EXPECT_THROW(is_typical(x, Eigen::Vector3d(1.0, 1.0, 1.0), 0.3), DimensionError);
  EXPECT_TRUE(is_typical(x, matops::SpdMatrix(diag.asDiagonal().toDenseMatrix()), 0.1));
}

TEST(SanovExponent, ValuesAndSmallEpsilon) {
  EXPECT_NEAR(sanov_exponent(200, 0.5, TailSide::upper), 100.0 * (0.5 - std::log(1.5)), 1e-12);
  EXPECT_NEAR(sanov_exponent(200, 0.5, TailSide::upper), 9.4535, 1e-4);
  EXPECT_GT(sanov_exponent(200, 0.5, TailSide::lower), sanov_exponent(200, 0.5, TailSide::upper));
  const double e = 1e-3;
  EXPECT_NEAR(sanov_exponent(100, e, TailSide::upper) / (100 * e * e / 4.0), 1.0, 2e-3);
  EXPECT_NEAR(sanov_exponent(100, e, TailSide::lower) / (100 * e * e / 4.0), 1.0, 2e-3);
  EXPECT_EQ(sanov_exponent(100, 0.0, TailSide::upper), 0.0);
  EXPECT_THROW(sanov_exponent(100, 1.0, TailSide::upper), DomainError);
}

TEST(ProbLowerBounds, ReferenceConfiguration) {
  const ProbBoundTriple b = prob_lower_bounds(200, 1000, 0.5);
  const double tail = 2.0 * std::exp(-100.0 * (0.5 - std::log(1.5)));
  EXPECT_NEAR(tail, 1.568e-4, 1e-6);
  EXPECT_NEAR(b.exact_product, std::pow(1.0 - tail, 1000.0), 1e-12);
  EXPECT_NEAR(b.exact_product, 0.8549, 1e-4);
  EXPECT_FALSE(b.vacuous);
  EXPECT_GE(b.exact_product, b.linearized);
  EXPECT_GE(b.linearized, b.simplified);
}

TEST(ProbLowerBounds, OrderingOnAGrid) {
  for (long n : {10L, 50L, 200L, 1000L})
    for (long p : {1L, 5L, 100L, 1000L})
      for (double eps = 0.01; eps < 1.0; eps += 0.01) {
        const ProbBoundTriple b = prob_lower_bounds(n, p, eps);
        EXPECT_LE(b.exact_product, 1.0);
        EXPECT_GE(b.exact_product, 0.0);
        if (!b.vacuous) {
          EXPECT_GE(b.exact_product, b.linearized - 1e-15);
        }
        EXPECT_GE(b.linearized, b.simplified - 1e-15);
      }
}

TEST(ProbLowerBounds, SmallEpsilonIsVacuous) {
  const ProbBoundTriple b = prob_lower_bounds(10, 5, 1e-6);
  EXPECT_TRUE(b.vacuous);
  EXPECT_EQ(b.exact_product, 0.0);
  EXPECT_NEAR(b.linearized, 1.0 - 2.0 * 5, 1e-4);
}

TEST(ProbLowerBounds, EpsilonSquaredOverSevenInequality) {
  // ε - log(1+ε) >= 2ε²/7 on (0, 1): the constant 7 is the largest integer
  // denominator for which it holds on the whole interval.
  for (int k = 1; k < 1000; ++k) {
    const double e = k * 1e-3;
    EXPECT_GE(e - std::log1p(e), 2.0 * e * e / 7.0);
  }
  bool six_fails = false;
  for (int k = 1; k < 1000; ++k) {
    const double e = k * 1e-3;
    if (e - std::log1p(e) < 2.0 * e * e / 6.0) six_fails = true;
  }
  EXPECT_TRUE(six_fails);
}

TEST(GammaTail, BoundedBySanovUpperAndLower) {
  for (TailSide side : {TailSide::upper, TailSide::lower}) {
    const GammaTailResult r = gamma_tail_check(50, 0.3, 20000, 9, 2.0, side);
    EXPECT_LE(r.empirical_tail, r.analytic_bound + 3.0 * r.std_error);
    EXPECT_GT(r.empirical_tail, 0.0);
  }
}

TEST(GammaTail, ReferenceExponent) {
  const GammaTailResult r = gamma_tail_check(200, 0.5, 20000, 10);
  EXPECT_NEAR(r.analytic_bound, 7.85e-5, 1e-7);
  EXPECT_LE(r.empirical_tail, r.analytic_bound + 3.0 * r.std_error);
  const GammaTailResult trivial = gamma_tail_check(20, 0.0, 1000, 11);
  EXPECT_EQ(trivial.analytic_bound, 1.0);
}

TEST(TypicalMembership, MonteCarloAboveExactProduct) {
  const long n = 50, p = 5;
  const double eps = 0.3;
  const ProbBoundTriple b = prob_lower_bounds(n, p, eps);
  const Eigen::VectorXd diag = Eigen::VectorXd::Ones(p);
  long hits = 0;
  const long trials = 5000;
  for (long k = 0; k < trials; ++k) {
    NormalSampler rng(substream(12, {static_cast<std::uint64_t>(k)}));
    if (is_typical(rng.matrix(n, p), diag, eps)) ++hits;
  }
  const double freq = static_cast<double>(hits) / trials;
  EXPECT_GE(freq, b.exact_product - 3.0 * proportion_std_error(freq, trials));
}
