#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "matops.hpp"
#include "model.hpp"
#include "rng.hpp"

namespace mdl {

/// Positive per-coordinate weights of the weighted ℓ1 norm.
class WeightVector {
 public:
  explicit WeightVector(Eigen::VectorXd w) : w_(std::move(w)) {
    for (Eigen::Index j = 0; j < w_.size(); ++j)
      if (!(w_[j] > 0.0) || !std::isfinite(w_[j]))
        throw DomainError("weight " + std::to_string(j) + " must be positive and finite");
  }

  /// w_j = sqrt((1/n) Σ_i x_ij²). Throws on an all-zero column.
  static WeightVector empirical(const Eigen::MatrixXd& x) {
    if (x.rows() == 0) throw DimensionError("design has no rows");
    Eigen::VectorXd w = (x.colwise().squaredNorm() / static_cast<double>(x.rows()))
                            .transpose()
                            .cwiseSqrt();
    for (Eigen::Index j = 0; j < w.size(); ++j)
      if (!(w[j] > 0.0)) throw DomainError("design column " + std::to_string(j) + " is all zero");
    return WeightVector(std::move(w));
  }

  /// w*_j = sqrt(Σ_jj).
  static WeightVector population(const matops::SpdMatrix& sigma) {
    return WeightVector(sigma.matrix().diagonal().cwiseSqrt());
  }

  static WeightVector ones(Eigen::Index p) { return WeightVector(Eigen::VectorXd::Ones(p)); }

  Eigen::Index size() const noexcept { return w_.size(); }
  const Eigen::VectorXd& values() const noexcept { return w_; }
  double operator[](Eigen::Index j) const { return w_[j]; }

 private:
  Eigen::VectorXd w_;
};

struct PenaltyCoefficients {
  double mu1;
  double mu2;

  PenaltyCoefficients(double m1, double m2) : mu1(m1), mu2(m2) {
    if (!(mu1 >= 0.0) || !(mu2 >= 0.0))
      throw DomainError("penalty coefficients must be nonnegative");
  }
};

/// Σ_j w_j |θ_j|.
inline double weighted_l1(const Eigen::VectorXd& theta, const WeightVector& w) {
  require_dims(theta.size() == w.size(), "weighted_l1: dimension mismatch");
  return theta.cwiseAbs().dot(w.values());
}

namespace detail {
inline void check_unit_open(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0))
    throw DomainError(std::string(name) + " must lie in (0, 1), got " + std::to_string(v));
}
inline void check_positive_count(long v, const char* name) {
  if (v < 1) throw DomainError(std::string(name) + " must be >= 1");
}
}  // namespace detail

/// Smallest (μ₁, μ₂) for which the weighted-ℓ1 lasso penalty (objective
/// normalized by 1/(2nσ²)) is ε-risk valid and carries the regret bound:
///   μ₁ = sqrt( log(4p) / (nβσ²(1-ε)) · (λ + 8 sqrt(1-ε²)) / 4 ),  μ₂ = log 2 / (nβ).
/// Multiply both by n for the unnormalized objective ‖Y-Xθ‖²/(2σ²) + ....
inline PenaltyCoefficients min_coefficients(long n, long p, DivergenceOrder order, double beta,
                                            double eps, double sigma2) {
  detail::check_positive_count(n, "n");
  detail::check_positive_count(p, "p");
  detail::check_unit_open(beta, "beta");
  detail::check_unit_open(eps, "epsilon");
  if (!(sigma2 > 0.0)) throw DomainError("sigma2 must be positive");
  const double lambda = order.value();
  if (lambda > 1.0 - beta + 1e-12)
    throw DomainError("order lambda must not exceed 1 - beta");
  const double log4p = std::log(4.0 * static_cast<double>(p));
  const double nb = static_cast<double>(n) * beta;
  const double mu1 = std::sqrt(log4p / (nb * sigma2 * (1.0 - eps)) *
                               (lambda + 8.0 * std::sqrt(1.0 - eps * eps)) / 4.0);
  return {mu1, std::numbers::ln2 / nb};
}

/// Fixed-design threshold sqrt(2 log(4p) / (nσ²)), per-sample normalization.
inline double fixed_design_mu1(long n, long p, double sigma2) {
  detail::check_positive_count(n, "n");
  detail::check_positive_count(p, "p");
  if (!(sigma2 > 0.0)) throw DomainError("sigma2 must be positive");
  return std::sqrt(2.0 * std::log(4.0 * static_cast<double>(p)) /
                   (static_cast<double>(n) * sigma2));
}

/// Ratio of the random-design to the fixed-design minimal μ₁ at β = 1-λ, ε → 0.
inline double design_ratio(DivergenceOrder order) {
  const double lambda = order.value();
  return std::sqrt((lambda + 8.0) / (8.0 * (1.0 - lambda)));
}

/// Description length of grid point z: (‖z‖₁ log(4p) + log 2) / β.
inline double grid_codelength(const std::vector<std::int64_t>& z, long p, double beta) {
  detail::check_positive_count(p, "p");
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("beta must lie in (0, 1]");
  double l1 = 0.0;
  for (std::int64_t v : z) l1 += std::abs(static_cast<double>(v));
  return (l1 * std::log(4.0 * static_cast<double>(p)) + std::numbers::ln2) / beta;
}

/// Σ_{z ∈ ℤ^p} exp(-β L̃(z)) = (1/2)(1 + 2/(4p-1))^p, by the geometric series
/// Σ_k (4p)^{-|k|} = 1 + 2/(4p-1) in each coordinate. β cancels.
inline double kraft_sum(long p, double beta = 1.0) {
  detail::check_positive_count(p, "p");
  if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("beta must lie in (0, 1]");
  const double four_p = 4.0 * static_cast<double>(p);
  const double per_coord = (four_p + 1.0) / (four_p - 1.0);  // 1 + 2/(4p-1), one rounding
  return 0.5 * std::pow(per_coord, static_cast<double>(p));
}

struct QuantizerSpec {
  double delta;
  WeightVector w_star;
  double beta;

  QuantizerSpec(double d, WeightVector w, double b) : delta(d), w_star(std::move(w)), beta(b) {
    if (!(delta > 0.0)) throw DomainError("quantization width must be positive");
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
  }

  /// Grid spacing δ / w*_j of coordinate j.
  double spacing(Eigen::Index j) const { return delta / w_star[j]; }
};

struct QuantizedPoint {
  Eigen::VectorXd theta;         // grid point δ (W*)^{-1} z
  std::vector<std::int64_t> z;   // integer coordinates
};

/// Randomized rounding onto the grid {δ (W*)^{-1} z}: with m_j = w*_j θ_j / δ,
/// round up with probability m_j - ⌊m_j⌋, otherwise down; exact when m_j is
/// an integer. Components are independent and E[θ̃] = θ, E|θ̃| = |θ|.
inline QuantizedPoint randomize_quantize(const Eigen::VectorXd& theta, const QuantizerSpec& spec,
                                         std::uint64_t seed, std::uint64_t stream = 0) {
  require_dims(theta.size() == spec.w_star.size(), "randomize_quantize: dimension mismatch");
  NormalSampler rng(substream(seed, {stream, 0x5155ULL}));
  QuantizedPoint out{Eigen::VectorXd(theta.size()), std::vector<std::int64_t>(theta.size())};
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double m = spec.w_star[j] * theta[j] / spec.delta;
    const double lo = std::floor(m);
    out.z[j] = static_cast<std::int64_t>(lo);
    if (m == lo) {
      out.theta[j] = theta[j];
      continue;
    }
    const double k = rng.uniform() < m - lo ? lo + 1.0 : lo;
    out.z[j] = static_cast<std::int64_t>(k);
    out.theta[j] = spec.spacing(j) * k;
  }
  return out;
}

}  // namespace mdl
