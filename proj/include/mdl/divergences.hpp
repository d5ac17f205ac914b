#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "model.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace mdl {

/// Order α of the α-divergence, strictly inside (-1, 1).
class AlphaOrder {
 public:
  explicit AlphaOrder(double alpha) : alpha_(alpha) {
    if (!(alpha > -1.0 && alpha < 1.0))
      throw DomainError("alpha must lie in (-1, 1), got " + std::to_string(alpha));
  }
  double value() const noexcept { return alpha_; }

 private:
  double alpha_;
};

struct McEstimate {
  double estimate;
  double std_error;
  std::uint64_t num_samples;
};

/// Samples per substream when Monte-Carlo work is sharded.
inline constexpr std::uint64_t kMcShardSize = 1u << 14;

/// Draws log(p_θ(y|x) / p*(y|x)) for (x, y) ~ q*·p*, shard `shard` of `seed`.
inline std::vector<double> sample_log_ratios(const GaussianLinearModel& model,
                                             const Eigen::VectorXd& theta, std::uint64_t count,
                                             std::uint64_t seed, std::uint64_t shard) {
  require_dims(theta.size() == model.dim(), "parameter dimension mismatch");
  NormalSampler normal(substream(seed, {shard, 0x4C52ULL}));
  const Eigen::VectorXd bar = theta - model.theta_star();
  const double sigma = std::sqrt(model.sigma2());
  std::vector<double> out(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const Eigen::VectorXd x = model.whiten(normal.vector(model.dim()));
    const double noise = sigma * normal();  // y - xᵀθ*
    const double resid = noise - x.dot(bar);  // y - xᵀθ
    out[i] = (noise * noise - resid * resid) / (2.0 * model.sigma2());
  }
  return out;
}

/// All log ratios for `num_samples`, generated shard by shard. The result is
/// independent of `workers`.
inline std::vector<double> sample_log_ratios(const GaussianLinearModel& model,
                                             const Eigen::VectorXd& theta,
                                             std::uint64_t num_samples, std::uint64_t seed,
                                             unsigned workers = 1) {
  const std::uint64_t shards = (num_samples + kMcShardSize - 1) / kMcShardSize;
  std::vector<std::vector<double>> parts(shards);
  auto work = [&](std::uint64_t first, std::uint64_t stride) {
    for (std::uint64_t s = first; s < shards; s += stride) {
      const std::uint64_t begin = s * kMcShardSize;
      const std::uint64_t count = std::min(kMcShardSize, num_samples - begin);
      parts[s] = sample_log_ratios(model, theta, count, seed, s);
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(shards)));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& t : pool) t.join();
  }
  std::vector<double> all;
  all.reserve(num_samples);
  for (auto& part : parts) all.insert(all.end(), part.begin(), part.end());
  return all;
}

/// Monte-Carlo Rényi divergence -(1/(1-λ)) log Ê[(p_θ/p*)^{1-λ}], computed in
/// log space with the standard error propagated through the log (delta method).
inline McEstimate renyi_mc(const GaussianLinearModel& model, const Eigen::VectorXd& theta,
                           DivergenceOrder order, std::uint64_t num_samples, std::uint64_t seed,
                           unsigned workers = 1) {
  if (num_samples < 1000) throw DomainError("renyi_mc needs at least 1000 samples");
  const double power = 1.0 - order.value();
  const std::vector<double> log_ratio = sample_log_ratios(model, theta, num_samples, seed, workers);
  double shift = -std::numeric_limits<double>::infinity();
  for (double l : log_ratio) shift = std::max(shift, power * l);
  RunningStats stats;
  for (double l : log_ratio) stats.push(std::exp(power * l - shift));
  const double mean = stats.mean();
  if (!(mean > 0.0) || !std::isfinite(shift))
    throw NumericalError("renyi_mc: non-positive mean likelihood ratio");
  const double log_mean = std::log(mean) + shift;
  return {-log_mean / power, stats.std_error() / (mean * power), num_samples};
}

/// KL divergence D(p*, p_θ) = θ̄ᵀΣθ̄ / (2σ²).
inline double kl_closed(const GaussianLinearModel& model, const Eigen::VectorXd& theta) {
  return model.quad_form(theta - model.theta_star()) / (2.0 * model.sigma2());
}

/// d_{0.5}.
inline double bhattacharyya(const GaussianLinearModel& model, const Eigen::VectorXd& theta) {
  return renyi_div(model, theta, DivergenceOrder(0.5));
}

/// Single-sample squared Hellinger distance (1/2)∫(√p* - √p_θ)² q* = 1 - e^{-d_{0.5}/2},
/// in [0, 1]. With this normalization the α = 0 divergence is 4 d²_H and
/// 2 d²_H <= d_{0.5}.
inline double hellinger_sq(const GaussianLinearModel& model, const Eigen::VectorXd& theta) {
  return -std::expm1(-0.5 * bhattacharyya(model, theta));
}

/// Single-sample α-divergence (4/(1-α²))(1 - Z) with Z the tilt normalizer at
/// λ = (1+α)/2.
inline double alpha_div(const GaussianLinearModel& model, const Eigen::VectorXd& theta,
                        AlphaOrder a) {
  const double alpha = a.value();
  const DivergenceOrder order((1.0 + alpha) / 2.0);
  const double c = tilt_scale(model.sigma2(), order);
  const double t = model.quad_form(theta - model.theta_star());
  // 1 - sqrt(c/(c+t)) without cancellation for small t.
  const double one_minus_z = -std::expm1(-0.5 * std::log1p(t / c));
  return 4.0 / (1.0 - alpha * alpha) * one_minus_z;
}

/// n-sample α-divergence for i.i.d. data; the normalizer multiplies across samples.
inline double alpha_div_n(const GaussianLinearModel& model, const Eigen::VectorXd& theta,
                          AlphaOrder a, long n) {
  const double alpha = a.value();
  const DivergenceOrder order((1.0 + alpha) / 2.0);
  const double c = tilt_scale(model.sigma2(), order);
  const double t = model.quad_form(theta - model.theta_star());
  const double one_minus_zn = -std::expm1(-0.5 * static_cast<double>(n) * std::log1p(t / c));
  return 4.0 / (1.0 - alpha * alpha) * one_minus_zn;
}

}  // namespace mdl
