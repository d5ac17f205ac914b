#pragma once

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "error.hpp"
#include "matops.hpp"

namespace mdl {

using matops::SpdMatrix;

/// Order λ of the Rényi divergence, strictly inside (0, 1).
class DivergenceOrder {
 public:
  explicit DivergenceOrder(double lambda) : lambda_(lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
      throw DomainError("divergence order must lie in (0, 1), got " + std::to_string(lambda));
  }
  double value() const noexcept { return lambda_; }
  operator double() const noexcept { return lambda_; }

 private:
  double lambda_;
};

/// Gaussian linear regression: x ~ N(0, Σ), y | x ~ N(x^T θ*, σ²).
/// Immutable after construction; Σ^{1/2} is cached.
class GaussianLinearModel {
 public:
  GaussianLinearModel(Eigen::VectorXd theta_star, double sigma2, SpdMatrix sigma)
      : theta_star_(std::move(theta_star)),
        sigma2_(sigma2),
        sigma_(std::move(sigma)),
        sqrt_sigma_(matops::sqrt_sym(sigma_)),
        diagonal_(sigma_.is_diagonal()) {
    if (!(sigma2_ > 0.0) || !std::isfinite(sigma2_))
      throw DomainError("noise variance must be positive and finite");
    require_dims(theta_star_.size() == sigma_.dim(),
                 "theta_star and Sigma dimensions differ");
  }

  Eigen::Index dim() const noexcept { return theta_star_.size(); }
  const Eigen::VectorXd& theta_star() const noexcept { return theta_star_; }
  double sigma2() const noexcept { return sigma2_; }
  const SpdMatrix& covariance() const noexcept { return sigma_; }
  const SpdMatrix& sqrt_covariance() const noexcept { return sqrt_sigma_; }

  /// ‖Σ^{1/2} v‖² = vᵀΣv.
  double quad_form(const Eigen::VectorXd& v) const {
    require_dims(v.size() == dim(), "parameter dimension mismatch");
    if (diagonal_) return v.cwiseAbs2().dot(sigma_.matrix().diagonal());
    return v.dot(sigma_.matrix() * v);
  }

  /// Σ^{1/2} v.
  Eigen::VectorXd whiten(const Eigen::VectorXd& v) const {
    require_dims(v.size() == dim(), "parameter dimension mismatch");
    if (diagonal_) return sqrt_sigma_.matrix().diagonal().cwiseProduct(v);
    return sqrt_sigma_.matrix() * v;
  }

 private:
  Eigen::VectorXd theta_star_;
  double sigma2_;
  SpdMatrix sigma_;
  SpdMatrix sqrt_sigma_;
  bool diagonal_;
};

/// c = σ² / (λ(1-λ)).
inline double tilt_scale(double sigma2, DivergenceOrder order) {
  return sigma2 / (order.value() * (1.0 - order.value()));
}

struct TiltedQuantities {
  double c;
  Eigen::VectorXd theta_bar;        // θ - θ*
  Eigen::VectorXd theta_bar_prime;  // Σ^{1/2}(θ - θ*)
  Eigen::VectorXd theta_lambda;     // λθ* + (1-λ)θ
  double Z;                         // sqrt(c / (c + ‖θ̄'‖²))
  Eigen::MatrixXd Sigma_tilted;     // covariance of the tilted feature law
};

/// The tilted feature distribution q^λ_θ = N(0, Σ^λ_θ) and its normalizer.
inline TiltedQuantities tilted(const GaussianLinearModel& model, const Eigen::VectorXd& theta,
                               DivergenceOrder order) {
  require_dims(theta.size() == model.dim(), "tilted: parameter dimension mismatch");
  const double lambda = order.value();
  TiltedQuantities t;
  t.c = tilt_scale(model.sigma2(), order);
  t.theta_bar = theta - model.theta_star();
  t.theta_bar_prime = model.whiten(t.theta_bar);
  t.theta_lambda = lambda * model.theta_star() + (1.0 - lambda) * theta;
  const double norm2 = t.theta_bar_prime.squaredNorm();
  t.Z = std::sqrt(t.c / (t.c + norm2));
  const Eigen::VectorXd u = model.sqrt_covariance().matrix() * t.theta_bar_prime;
  t.Sigma_tilted = model.covariance().matrix() - (u * u.transpose()) / (t.c + norm2);
  return t;
}

/// Σ^λ_θ by the second route: (Σ^{-1} + θ̄θ̄ᵀ/c)^{-1} via a rank-one inverse update of Σ.
inline Eigen::MatrixXd tilted_covariance_rank_one(const GaussianLinearModel& model,
                                                  const Eigen::VectorXd& theta,
                                                  DivergenceOrder order) {
  require_dims(theta.size() == model.dim(), "parameter dimension mismatch");
  const double c = tilt_scale(model.sigma2(), order);
  const Eigen::VectorXd bar = theta - model.theta_star();
  return matops::sherman_morrison(model.covariance(), bar / c, bar);
}

/// Single-sample Rényi divergence d_λ(p*, p_θ) = log(1 + ‖θ̄'‖²/c) / (2(1-λ)).
inline double renyi_div(const GaussianLinearModel& model, const Eigen::VectorXd& theta,
                        DivergenceOrder order) {
  const double c = tilt_scale(model.sigma2(), order);
  const double t = model.quad_form(theta - model.theta_star());
  return std::log1p(t / c) / (2.0 * (1.0 - order.value()));
}

/// n-sample divergence for i.i.d. data.
inline double renyi_div_n(const GaussianLinearModel& model, const Eigen::VectorXd& theta,
                          DivergenceOrder order, long n) {
  return static_cast<double>(n) * renyi_div(model, theta, order);
}

inline Eigen::VectorXd renyi_grad(const GaussianLinearModel& model, const Eigen::VectorXd& theta,
                                  DivergenceOrder order) {
  const double lambda = order.value();
  const double c = tilt_scale(model.sigma2(), order);
  const Eigen::VectorXd bar_prime = model.whiten(theta - model.theta_star());
  const double shrink = c / (c + bar_prime.squaredNorm());
  return (lambda / model.sigma2()) * shrink * model.whiten(bar_prime);
}

inline Eigen::MatrixXd renyi_hess(const GaussianLinearModel& model, const Eigen::VectorXd& theta,
                                  DivergenceOrder order) {
  const double lambda = order.value();
  const double c = tilt_scale(model.sigma2(), order);
  const Eigen::VectorXd bar_prime = model.whiten(theta - model.theta_star());
  const double denom = c + bar_prime.squaredNorm();
  const Eigen::VectorXd u = model.whiten(bar_prime);
  const double k = lambda / model.sigma2();
  return k * (c / denom) * model.covariance().matrix() -
         2.0 * k * (c / (denom * denom)) * (u * u.transpose());
}

/// Smallest eigenvalue of (λ/(8σ²))Σ + ∇²d_λ. Nonnegative certifies that the
/// negative Hessian is dominated by (λ/(8σ²))Σ at θ.
inline double hessian_bound_gap(const GaussianLinearModel& model, const Eigen::VectorXd& theta,
                                DivergenceOrder order) {
  const Eigen::MatrixXd gap =
      (order.value() / (8.0 * model.sigma2())) * model.covariance().matrix() +
      renyi_hess(model, theta, order);
  return matops::min_eigenvalue(0.5 * (gap + gap.transpose()));
}

}  // namespace mdl
