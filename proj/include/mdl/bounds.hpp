#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>
#include <utility>

#include <Eigen/Dense>

#include "divergences.hpp"
#include "error.hpp"
#include "lasso.hpp"
#include "model.hpp"
#include "penalty.hpp"
#include "rng.hpp"
#include "stats.hpp"
#include "typical_set.hpp"

namespace mdl {

/// (λ, β, ε, τ) with λ <= 1 - β.
struct BoundConfig {
  DivergenceOrder lambda;
  double beta;
  double eps;
  double tau;

  BoundConfig(DivergenceOrder l, double b, double e, double t)
      : lambda(l), beta(b), eps(e), tau(t) {
    detail::check_unit_open(beta, "beta");
    detail::check_unit_open(eps, "epsilon");
    if (!(tau > 0.0)) throw DomainError("tau must be positive");
    if (lambda.value() > 1.0 - beta + 1e-12)
      throw DomainError("inadmissible configuration: lambda must not exceed 1 - beta");
  }
};

struct RegretCertificate {
  double lambda;
  double main_term;
  double bound;              // main_term + τ
  double probability_floor;  // exact_product - e^{-τnβ}, clamped at 0
  bool vacuous;              // floor clamped
  double kappa;              // min{ε²/7, τβ}
  double simplified_floor;   // 1 - (2p+1) e^{-nκ} <= probability_floor
  double mu1;
  double mu2;
};

/// inf_θ { (‖Y-Xθ‖² - ‖Y-Xθ*‖²)/(2nσ²) + μ₁‖θ‖_{w,1} + μ₂ }, attained at the lasso
/// solution θ̂ since the bracket differs from the objective by a constant.
inline double regret_main_term(const LassoProblem& prob, const Eigen::VectorXd& theta_star,
                               const Eigen::VectorXd& theta_hat) {
  return objective(prob, theta_hat) - prob.data_fit(theta_star) + prob.coeffs().mu2;
}

/// The bracketed expression at an arbitrary θ (upper-bounds the main term).
inline double regret_probe(const LassoProblem& prob, const Eigen::VectorXd& theta_star,
                           const Eigen::VectorXd& theta) {
  return regret_main_term(prob, theta_star, theta);
}

/// exact_product(n, p, ε) - e^{-τnβ}; clamped at 0 with `vacuous` set otherwise.
inline std::pair<double, bool> probability_floor(long n, long p, const BoundConfig& config) {
  const ProbBoundTriple b = prob_lower_bounds(n, p, config.eps);
  const double floor =
      b.exact_product - std::exp(-config.tau * static_cast<double>(n) * config.beta);
  if (b.vacuous || floor <= 0.0) return {0.0, true};
  return {floor, false};
}

inline RegretCertificate regret_certificate(const LassoProblem& prob,
                                            const GaussianLinearModel& model,
                                            const BoundConfig& config,
                                            const Eigen::VectorXd& theta_hat) {
  require_dims(model.dim() == prob.p(), "regret_certificate: model/problem dimension mismatch");
  const long n = static_cast<long>(prob.n());
  const long p = static_cast<long>(prob.p());
  const PenaltyCoefficients need =
      min_coefficients(n, p, config.lambda, config.beta, config.eps, model.sigma2());
  const double slack = 1e-12;
  if (prob.coeffs().mu1 < need.mu1 * (1.0 - slack) || prob.coeffs().mu2 < need.mu2 * (1.0 - slack))
    throw InvalidCertificateError("penalty coefficients are below the minimum for (lambda, beta, eps)");

  RegretCertificate cert{};
  cert.lambda = config.lambda.value();
  cert.main_term = regret_main_term(prob, model.theta_star(), theta_hat);
  cert.bound = cert.main_term + config.tau;
  std::tie(cert.probability_floor, cert.vacuous) = probability_floor(n, p, config);
  cert.kappa = std::min(config.eps * config.eps / 7.0, config.tau * config.beta);
  cert.simplified_floor =
      1.0 - (2.0 * static_cast<double>(p) + 1.0) * std::exp(-static_cast<double>(n) * cert.kappa);
  cert.mu1 = prob.coeffs().mu1;
  cert.mu2 = prob.coeffs().mu2;
  return cert;
}

inline RegretCertificate regret_certificate(const LassoProblem& prob,
                                            const GaussianLinearModel& model,
                                            const BoundConfig& config,
                                            SolveOptions opts = {}) {
  return regret_certificate(prob, model, config, solve(prob, opts).theta_hat);
}

/// -p log(1 - 2e^{-(n/2)(ε - log(1+ε))}) / (nβ).
inline double typical_set_penalty(long n, long p, const BoundConfig& config) {
  const double tail = 2.0 * std::exp(-sanov_exponent(n, config.eps, TailSide::upper));
  if (tail >= 1.0) throw DomainError("typical-set probability bound is vacuous for this (n, eps)");
  return -static_cast<double>(p) * std::log1p(-tail) /
         (static_cast<double>(n) * config.beta);
}

struct RiskBoundEstimate {
  double rhs;              // Ê[inf term | typical] + typical_set_penalty
  double std_error;
  double penalty_term;
  double mean_divergence;  // Ê[d_λ(p*, p_θ̂) | typical] on the same draws
  double divergence_std_error;
  std::uint64_t accepted;
  std::uint64_t rejected;
  std::uint64_t nonconverged;
};

/// Monte-Carlo estimate of the risk-bound right side. Designs with n rows are
/// drawn from N(0, Σ) and rejected unless typical, so the average is the exact
/// conditional expectation given xⁿ ∈ Aⁿ_ε.
inline RiskBoundEstimate risk_bound_rhs(const GaussianLinearModel& model,
                                        const BoundConfig& config, long n,
                                        const PenaltyCoefficients& coeffs,
                                        std::uint64_t num_mc, std::uint64_t seed,
                                        SolveOptions opts = {}) {
  if (num_mc < 100) throw DomainError("risk_bound_rhs needs at least 100 draws");
  const long p = static_cast<long>(model.dim());
  const Eigen::VectorXd sigma_diag = model.covariance().matrix().diagonal();
  const double noise_sd = std::sqrt(model.sigma2());
  RunningStats inf_term, divergence;
  RiskBoundEstimate est{};
  for (std::uint64_t k = 0; k < num_mc; ++k) {
    NormalSampler normal(substream(seed, {k, 0x5242ULL}));
    Eigen::MatrixXd x = normal.matrix(n, p) * model.sqrt_covariance().matrix();
    if (!is_typical(x, sigma_diag, config.eps)) {
      ++est.rejected;
      continue;
    }
    Eigen::VectorXd y = x * model.theta_star() + noise_sd * normal.vector(n);
    const LassoProblem prob(std::move(x), std::move(y), model.sigma2(), coeffs);
    const SolveReport rep = solve(prob, opts);
    if (!rep.converged) ++est.nonconverged;
    ++est.accepted;
    inf_term.push(regret_main_term(prob, model.theta_star(), rep.theta_hat));
    divergence.push(renyi_div(model, rep.theta_hat, config.lambda));
  }
  if (est.accepted < 10)
    throw InsufficientAcceptanceError("risk_bound_rhs: fewer than 10 typical designs accepted");
  est.penalty_term = typical_set_penalty(n, p, config);
  est.rhs = inf_term.mean() + est.penalty_term;
  est.std_error = inf_term.std_error();
  est.mean_divergence = divergence.mean();
  est.divergence_std_error = divergence.std_error();
  return est;
}

/// Upper bound on E[Dⁿ_α(p*, p_θ̂)] given the (n-sample) redundancy R and a
/// typical-set probability P:
///   R/λ(α) + P log(1/P)/(λ(α)β) + (1-P)/(λ(α)(λ(α)+α)),  λ(α) = (1-α)/2.
inline double alpha_risk_bound_at(double redundancy, double prob, double beta, AlphaOrder a) {
  const double alpha = a.value();
  if (alpha < 2.0 * beta - 1.0 - 1e-12)
    throw DomainError("alpha_risk_bound: alpha must be >= 2 beta - 1");
  if (!(prob > 0.0 && prob <= 1.0)) throw DomainError("alpha_risk_bound: P must lie in (0, 1]");
  const double lam = (1.0 - alpha) / 2.0;
  return redundancy / lam + prob * std::log(1.0 / prob) / (lam * beta) +
         (1.0 - prob) / (lam * (lam + alpha));
}

/// As above with P replaced by the product lower bound of the typical-set
/// probability. That substitution is conservative only for P >= 1/e, which
/// is enforced.
inline double alpha_risk_bound(double redundancy, long n, long p, const BoundConfig& config,
                               AlphaOrder a) {
  const ProbBoundTriple b = prob_lower_bounds(n, p, config.eps);
  if (b.vacuous || b.exact_product < std::exp(-1.0))
    throw DomainError(
        "alpha_risk_bound: typical-set lower bound below 1/e; substitution not conservative");
  return alpha_risk_bound_at(redundancy, b.exact_product, config.beta, a);
}

/// The regret bound at λ = 0.5, read as a bound on 2d²_H (2d²_H <= d_{0.5}).
inline double hellinger_regret_bound(const RegretCertificate& cert) {
  if (cert.lambda != 0.5)
    throw DomainError("hellinger_regret_bound requires a certificate built at lambda = 0.5");
  return cert.bound;
}

}  // namespace mdl
