#include <gtest/gtest.h>

#include <cmath>

#include "mdl/divergences.hpp"
#include "mdl/instances.hpp"
#include "oracles.hpp"

using namespace mdl;
using matops::SpdMatrix;

namespace {

GaussianLinearModel identity_model(Eigen::Index p, double sigma2) {
  return GaussianLinearModel(Eigen::VectorXd::Zero(p), sigma2, SpdMatrix::identity(p));
}

NormalSampler sampler(std::uint64_t tag) { return NormalSampler(substream(303, {tag})); }

}  // namespace

TEST(RenyiMc, ZeroAtTruthExactly) {
  const GaussianLinearModel m = identity_model(3, 1.0);
  const McEstimate e = renyi_mc(m, m.theta_star(), DivergenceOrder(0.5), 2000, 1);
  EXPECT_EQ(e.estimate, 0.0);
  EXPECT_EQ(e.std_error, 0.0);
  EXPECT_EQ(e.num_samples, 2000u);
}

TEST(RenyiMc, LogTwoExample) {
  const GaussianLinearModel m = identity_model(2, 1.0);
  const McEstimate e = renyi_mc(m, Eigen::Vector2d(2.0, 0.0), DivergenceOrder(0.5), 100000, 2);
  EXPECT_GT(e.std_error, 0.0);
  EXPECT_LE(std::abs(e.estimate - std::log(2.0)), 3.0 * e.std_error);
}

TEST(RenyiMc, HighOrderRandomInstance) {
  NormalSampler rng = sampler(1);
  const GaussianLinearModel m = instances::random_model(rng, 3);
  const Eigen::VectorXd theta = instances::displaced_theta(rng, m, 0.4);
  const DivergenceOrder order(0.9);
  const McEstimate e = renyi_mc(m, theta, order, 100000, 3);
  EXPECT_LE(std::abs(e.estimate - renyi_div(m, theta, order)), 3.0 * e.std_error);
}

TEST(RenyiMc, IndependentOfWorkerCount) {
  NormalSampler rng = sampler(2);
  const GaussianLinearModel m = instances::random_model(rng, 4);
  const Eigen::VectorXd theta = instances::displaced_theta(rng, m, 0.3);
  const McEstimate one = renyi_mc(m, theta, DivergenceOrder(0.25), 50000, 4, 1);
  const McEstimate three = renyi_mc(m, theta, DivergenceOrder(0.25), 50000, 4, 3);
  EXPECT_EQ(one.estimate, three.estimate);
  EXPECT_EQ(one.std_error, three.std_error);
}

TEST(RenyiMc, RejectsTooFewSamples) {
  const GaussianLinearModel m = identity_model(1, 1.0);
  EXPECT_THROW(renyi_mc(m, m.theta_star(), DivergenceOrder(0.5), 999, 1), DomainError);
}

TEST(KlClosed, Examples) {
  const GaussianLinearModel m = identity_model(2, 1.0);
  EXPECT_EQ(kl_closed(m, m.theta_star()), 0.0);
  EXPECT_DOUBLE_EQ(kl_closed(m, Eigen::Vector2d(2.0, 0.0)), 2.0);
  Eigen::MatrixXd s = Eigen::Vector2d(1.0, 4.0).asDiagonal();
  const GaussianLinearModel md(Eigen::VectorXd::Zero(2), 2.0, SpdMatrix(s));
  EXPECT_DOUBLE_EQ(kl_closed(md, Eigen::Vector2d(1.0, 1.0)), 1.25);
}

TEST(KlClosed, MatchesMeanLogRatio) {
  Eigen::MatrixXd s = Eigen::Vector2d(1.0, 4.0).asDiagonal();
  const GaussianLinearModel md(Eigen::VectorXd::Zero(2), 2.0, SpdMatrix(s));
  const auto mc = oracle::joint_expectation(md, Eigen::Vector2d(1.0, 1.0), 100000, 6,
                                            [](double l) { return -l; });
  EXPECT_LE(std::abs(mc.mean - 1.25), 3.0 * mc.se);
}

TEST(Bhattacharyya, IsRenyiAtOneHalf) {
  const GaussianLinearModel m = identity_model(2, 1.0);
  EXPECT_EQ(bhattacharyya(m, m.theta_star()), 0.0);
  EXPECT_NEAR(bhattacharyya(m, Eigen::Vector2d(0.0, 2.0)), std::log(2.0), 1e-15);
  NormalSampler rng = sampler(3);
  for (int k = 0; k < 20; ++k) {
    const GaussianLinearModel r = instances::random_model(rng, 3);
    const Eigen::VectorXd theta = instances::displaced_theta(rng, r, 4.0 * rng.uniform());
    EXPECT_EQ(bhattacharyya(r, theta), renyi_div(r, theta, DivergenceOrder(0.5)));
  }
}

TEST(Hellinger, ClosedFormAndAsymptote) {
  const GaussianLinearModel m = identity_model(2, 1.0);
  EXPECT_EQ(hellinger_sq(m, m.theta_star()), 0.0);
  EXPECT_NEAR(hellinger_sq(m, Eigen::Vector2d(2.0, 0.0)), 1.0 - std::sqrt(0.5), 1e-15);
  const double far = hellinger_sq(m, Eigen::Vector2d(1e4, 0.0));
  EXPECT_LE(far, 1.0);
  EXPECT_NEAR(far, 1.0, 1e-3);
}

TEST(Hellinger, MatchesHalfSquaredRootDifference) {
  // (1/2) ∫ (√p* - √p_θ)² q* = E_{p*}[1 - sqrt(p_θ/p*)].
  const GaussianLinearModel m = identity_model(2, 1.0);
  const auto mc = oracle::joint_expectation(m, Eigen::Vector2d(2.0, 0.0), 100000, 7,
                                            [](double l) { return 1.0 - std::exp(0.5 * l); });
  EXPECT_LE(std::abs(mc.mean - (1.0 - std::sqrt(0.5))), 3.0 * mc.se);
}

TEST(Hellinger, TwiceSquaredDistanceBoundedByBhattacharyya) {
  NormalSampler rng = sampler(4);
  for (int k = 0; k < 200; ++k) {
    const GaussianLinearModel m = instances::random_model(rng, 1 + k % 5);
    const Eigen::VectorXd theta =
        instances::displaced_theta(rng, m, std::exp(-8.0 + 20.0 * rng.uniform()));
    const double h = hellinger_sq(m, theta);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, 1.0);
    EXPECT_LE(2.0 * h, bhattacharyya(m, theta) + 1e-12);
  }
}

TEST(AlphaDiv, Examples) {
  const GaussianLinearModel m = identity_model(2, 1.0);
  EXPECT_EQ(alpha_div(m, m.theta_star(), AlphaOrder(0.3)), 0.0);
  const Eigen::VectorXd theta = Eigen::Vector2d(2.0, 0.0);
  EXPECT_NEAR(alpha_div(m, theta, AlphaOrder(0.0)), 4.0 * hellinger_sq(m, theta), 1e-15);
  const double c = 16.0 / 3.0;
  const double z = std::sqrt(c / (c + 4.0));
  EXPECT_NEAR(z, 0.7559289460, 1e-9);
  EXPECT_NEAR(alpha_div(m, theta, AlphaOrder(0.5)), c * (1.0 - z), 1e-14);
  EXPECT_NEAR(alpha_div(m, theta, AlphaOrder(0.5)), 1.3016, 1e-3);
}

TEST(AlphaDiv, MatchesDefiningIntegral) {
  // D_α = (4/(1-α²)) E_{p*}[1 - (p_θ/p*)^{(1-α)/2}].
  const GaussianLinearModel m = identity_model(2, 1.0);
  const double alpha = 0.5;
  const auto mc = oracle::joint_expectation(m, Eigen::Vector2d(2.0, 0.0), 100000, 8, [&](double l) {
    return 4.0 / (1.0 - alpha * alpha) * (1.0 - std::exp(0.5 * (1.0 - alpha) * l));
  });
  EXPECT_LE(std::abs(mc.mean - alpha_div(m, Eigen::Vector2d(2.0, 0.0), AlphaOrder(alpha))),
            3.0 * mc.se);
}

TEST(AlphaDiv, BoundedAndDominatedByRenyi) {
  NormalSampler rng = sampler(5);
  for (int k = 0; k < 200; ++k) {
    const GaussianLinearModel m = instances::random_model(rng, 1 + k % 4);
    const Eigen::VectorXd theta =
        instances::displaced_theta(rng, m, std::exp(-6.0 + 18.0 * rng.uniform()));
    const AlphaOrder a(-0.95 + 1.9 * rng.uniform());
    const double alpha = a.value();
    const double d = alpha_div(m, theta, a);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 4.0 / (1.0 - alpha * alpha));
    const double lam = (1.0 + alpha) / 2.0;
    EXPECT_LE(lam * d, renyi_div(m, theta, DivergenceOrder(lam)) + 1e-12);
  }
}

TEST(AlphaDiv, SampleVersionUsesProductNormalizer) {
  const GaussianLinearModel m = identity_model(2, 1.0);
  const Eigen::VectorXd theta = Eigen::Vector2d(2.0, 0.0);
  const double z = std::sqrt(0.5);
  EXPECT_NEAR(alpha_div_n(m, theta, AlphaOrder(0.0), 3), 4.0 * (1.0 - z * z * z), 1e-14);
  EXPECT_NEAR(alpha_div_n(m, theta, AlphaOrder(0.0), 1), alpha_div(m, theta, AlphaOrder(0.0)),
              1e-15);
  EXPECT_THROW(AlphaOrder(1.0), DomainError);
  EXPECT_THROW(AlphaOrder(-1.0), DomainError);
}
