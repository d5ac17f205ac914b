#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

#include <Eigen/Dense>

#include "error.hpp"
#include "penalty.hpp"

namespace mdl {

/// min_θ ‖Y - Xθ‖² / (2nσ²) + μ₁ ‖θ‖_{w,1}, with w the empirical column weights.
class LassoProblem {
 public:
  LassoProblem(Eigen::MatrixXd x, Eigen::VectorXd y, double sigma2, PenaltyCoefficients coeffs)
      : x_(std::move(x)),
        y_(std::move(y)),
        sigma2_(sigma2),
        coeffs_(coeffs),
        w_(WeightVector::empirical(x_)) {
    require_dims(x_.rows() == y_.size(), "LassoProblem: X rows and Y length differ");
    if (!(sigma2_ > 0.0)) throw DomainError("LassoProblem: sigma2 must be positive");
  }

  Eigen::Index n() const noexcept { return x_.rows(); }
  Eigen::Index p() const noexcept { return x_.cols(); }
  const Eigen::MatrixXd& X() const noexcept { return x_; }
  const Eigen::VectorXd& Y() const noexcept { return y_; }
  double sigma2() const noexcept { return sigma2_; }
  const PenaltyCoefficients& coeffs() const noexcept { return coeffs_; }
  const WeightVector& weights() const noexcept { return w_; }

  /// 1/(2nσ²), the data-fit normalization.
  double fit_scale() const noexcept { return 1.0 / (2.0 * static_cast<double>(n()) * sigma2_); }

  /// Smooth part ‖Y - Xθ‖² / (2nσ²).
  double data_fit(const Eigen::VectorXd& theta) const {
    require_dims(theta.size() == p(), "parameter dimension mismatch");
    return (y_ - x_ * theta).squaredNorm() * fit_scale();
  }

  /// ∇ of the smooth part: -Xᵀ(Y - Xθ) / (nσ²).
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const {
    require_dims(theta.size() == p(), "parameter dimension mismatch");
    return -(x_.transpose() * (y_ - x_ * theta)) * (2.0 * fit_scale());
  }

 private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  double sigma2_;
  PenaltyCoefficients coeffs_;
  WeightVector w_;
};

/// Objective value; μ₂ is omitted since it does not depend on θ.
inline double objective(const LassoProblem& prob, const Eigen::VectorXd& theta) {
  return prob.data_fit(theta) + prob.coeffs().mu1 * weighted_l1(theta, prob.weights());
}

inline double soft_threshold(double x, double t) {
  if (t < 0.0) throw DomainError("soft_threshold: threshold must be nonnegative");
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

/// Max violation of the subgradient optimality conditions given the gradient g.
inline double kkt_residual(const LassoProblem& prob, const Eigen::VectorXd& theta,
                           const Eigen::VectorXd& g) {
  const double mu1 = prob.coeffs().mu1;
  const auto& w = prob.weights().values();
  double r = 0.0;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double bound = mu1 * w[j];
    const double v = theta[j] != 0.0 ? std::abs(g[j] + bound * (theta[j] > 0.0 ? 1.0 : -1.0))
                                     : std::max(std::abs(g[j]) - bound, 0.0);
    r = std::max(r, v);
  }
  return r;
}

inline double kkt_residual(const LassoProblem& prob, const Eigen::VectorXd& theta) {
  return kkt_residual(prob, theta, prob.gradient(theta));
}

struct PowerIterationOptions {
  int max_iter = 100;
  double tol = 1e-10;
};

/// Largest eigenvalue of XᵀX by power iteration on the smaller Gram matrix.
inline double gram_spectral_norm(const Eigen::MatrixXd& x, PowerIterationOptions opts = {}) {
  const bool tall = x.rows() >= x.cols();
  const Eigen::MatrixXd gram = tall ? Eigen::MatrixXd(x.transpose() * x)
                                    : Eigen::MatrixXd(x * x.transpose());
  if (gram.rows() == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(gram.rows()).normalized();
  double rq = v.dot(gram * v);
  for (int it = 0; it < opts.max_iter; ++it) {
    Eigen::VectorXd gv = gram * v;
    const double norm = gv.norm();
    if (norm == 0.0) return 0.0;
    v = gv / norm;
    const double next = v.dot(gram * v);
    const bool done = std::abs(next - rq) <= opts.tol * std::max(1.0, std::abs(next));
    rq = next;
    if (done) break;
  }
  return rq;
}

struct SolveOptions {
  double tol = 1e-6;
  int max_iter = 10000;
  bool accelerate = false;  // FISTA momentum; gives up monotone descent
  PowerIterationOptions power{};
};

struct SolveReport {
  Eigen::VectorXd theta_hat;
  double objective_value = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
  bool converged = false;
  double lipschitz = 0.0;
};

/// Called after every iteration with (iteration, θ, objective).
using IterationObserver = std::function<void(int, const Eigen::VectorXd&, double)>;

/// Proximal gradient (ISTA) from θ⁰ = 0 with step 1/L, L = λ_max(XᵀX)/(nσ²).
/// When a step fails the quadratic upper-bound test (possible only if power
/// iteration underestimated L) L is increased and the step retried, so the
/// objective never increases.
inline SolveReport solve(const LassoProblem& prob, SolveOptions opts = {},
                         const IterationObserver& observer = {}) {
  if (!(opts.tol > 0.0)) throw DomainError("solve: tolerance must be positive");
  const Eigen::Index p = prob.p();
  const double mu1 = prob.coeffs().mu1;
  const Eigen::VectorXd& w = prob.weights().values();
  const double scale = prob.fit_scale();

  double lip = gram_spectral_norm(prob.X(), opts.power) * 2.0 * scale;
  if (!(lip > 0.0)) lip = 1.0;

  SolveReport rep;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd resid = prob.Y();
  Eigen::VectorXd grad = -(prob.X().transpose() * resid) * (2.0 * scale);
  double fit = resid.squaredNorm() * scale;
  double obj = fit;
  double kkt = kkt_residual(prob, theta, grad);

  // FISTA state: extrapolated point and its residual/gradient.
  Eigen::VectorXd prev = theta;
  double t_k = 1.0;
  Eigen::VectorXd anchor = theta, anchor_resid = resid, anchor_grad = grad;
  double anchor_fit = fit;

  int it = 0;
  while (kkt > opts.tol && it < opts.max_iter) {
    ++it;
    const Eigen::VectorXd& base = opts.accelerate ? anchor : theta;
    const Eigen::VectorXd& base_grad = opts.accelerate ? anchor_grad : grad;
    const double base_fit = opts.accelerate ? anchor_fit : fit;

    Eigen::VectorXd next(p), next_resid;
    double next_fit = 0.0;
    for (;;) {
      const double step = 1.0 / lip;
      for (Eigen::Index j = 0; j < p; ++j)
        next[j] = soft_threshold(base[j] - step * base_grad[j], step * mu1 * w[j]);
      next_resid = prob.Y() - prob.X() * next;
      next_fit = next_resid.squaredNorm() * scale;
      const Eigen::VectorXd d = next - base;
      const double model = base_fit + base_grad.dot(d) + 0.5 * lip * d.squaredNorm();
      if (next_fit <= model + 1e-12 * std::max(1.0, std::abs(model))) break;
      lip *= 1.1;
    }

    prev = theta;
    theta = std::move(next);
    resid = std::move(next_resid);
    fit = next_fit;
    grad = -(prob.X().transpose() * resid) * (2.0 * scale);
    obj = fit + mu1 * theta.cwiseAbs().dot(w);
    kkt = kkt_residual(prob, theta, grad);

    if (opts.accelerate) {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_k * t_k));
      anchor = theta + ((t_k - 1.0) / t_next) * (theta - prev);
      t_k = t_next;
      anchor_resid = prob.Y() - prob.X() * anchor;
      anchor_fit = anchor_resid.squaredNorm() * scale;
      anchor_grad = -(prob.X().transpose() * anchor_resid) * (2.0 * scale);
    }
    if (observer) observer(it, theta, obj);
  }

  rep.theta_hat = std::move(theta);
  rep.objective_value = obj;
  rep.iterations = it;
  rep.kkt_residual = kkt;
  rep.converged = kkt <= opts.tol;
  rep.lipschitz = lip;
  return rep;
}

}  // namespace mdl
