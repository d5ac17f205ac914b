#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "error.hpp"
#include "matops.hpp"
#include "rng.hpp"
#include "stats.hpp"

namespace mdl {

/// Lower bounds on P(xⁿ ∈ Aⁿ_ε), loosest last.
struct ProbBoundTriple {
  double exact_product;  // (1 - 2e^{-(n/2)(ε - log(1+ε))})^p, clamped to 0 when vacuous
  double linearized;     // 1 - 2p e^{-(n/2)(ε - log(1+ε))}
  double simplified;     // 1 - 2p e^{-nε²/7}
  bool vacuous;          // the per-column factor is negative
};

/// Does every column satisfy 1-ε <= ((1/n) Σ_i x_ij²) / Σ_jj <= 1+ε ?
inline bool column_is_typical(const Eigen::MatrixXd& x, Eigen::Index j, double sigma_jj,
                              double eps) {
  if (!(sigma_jj > 0.0)) throw DomainError("Sigma_jj must be positive");
  const double ratio = x.col(j).squaredNorm() / static_cast<double>(x.rows()) / sigma_jj;
  return ratio >= 1.0 - eps && ratio <= 1.0 + eps;
}

inline bool is_typical(const Eigen::MatrixXd& x, const Eigen::VectorXd& sigma_diag, double eps) {
  require_dims(x.cols() == sigma_diag.size(), "is_typical: design/covariance dimension mismatch");
  require_dims(x.rows() > 0, "is_typical: empty design");
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    if (!column_is_typical(x, j, sigma_diag[j], eps)) return false;
  return true;
}

inline bool is_typical(const Eigen::MatrixXd& x, const matops::SpdMatrix& sigma, double eps) {
  return is_typical(x, sigma.matrix().diagonal(), eps);
}

enum class TailSide { upper, lower };

/// KL exponent of the Gamma(n/2, 2s/n) tail at s(1±ε): (n/2)(±ε - log(1±ε)).
inline double sanov_exponent(long n, double eps, TailSide side) {
  if (n < 1) throw DomainError("n must be >= 1");
  if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("epsilon must lie in [0, 1)");
  const double half_n = 0.5 * static_cast<double>(n);
  if (side == TailSide::upper) return half_n * (eps - std::log1p(eps));
  return half_n * (-eps - std::log1p(-eps));
}

inline ProbBoundTriple prob_lower_bounds(long n, long p, double eps) {
  if (n < 1 || p < 1) throw DomainError("n and p must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  const double tail = 2.0 * std::exp(-sanov_exponent(n, eps, TailSide::upper));
  const double pd = static_cast<double>(p);
  ProbBoundTriple b{};
  b.vacuous = tail > 1.0;
  b.exact_product = b.vacuous ? 0.0 : std::exp(pd * std::log1p(-tail));
  b.linearized = 1.0 - pd * tail;
  b.simplified = 1.0 - 2.0 * pd * std::exp(-static_cast<double>(n) * eps * eps / 7.0);
  return b;
}

struct GammaTailResult {
  double empirical_tail;
  double std_error;
  double analytic_bound;  // e^{-D}
};

/// Monte-Carlo check of the Sanov-type tail bound for the column mean square
/// w² = (1/n) Σ_i x_i², x_i ~ N(0, s), i.e. w² ~ Ga(n/2, 2s/n).
inline GammaTailResult gamma_tail_check(long n, double eps, std::uint64_t num_mc,
                                        std::uint64_t seed, double s = 1.0,
                                        TailSide side = TailSide::upper) {
  if (num_mc < 1000) throw DomainError("gamma_tail_check needs at least 1000 draws");
  if (!(s > 0.0)) throw DomainError("scale s must be positive");
  const double bound = std::exp(-sanov_exponent(n, eps, side));
  NormalSampler normal(substream(seed, {0x4754ULL}));
  const double sd = std::sqrt(s);
  const double threshold = side == TailSide::upper ? s * (1.0 + eps) : s * (1.0 - eps);
  std::uint64_t hits = 0;
  for (std::uint64_t k = 0; k < num_mc; ++k) {
    double sum = 0.0;
    for (long i = 0; i < n; ++i) {
      const double v = sd * normal();
      sum += v * v;
    }
    const double w2 = sum / static_cast<double>(n);
    if (side == TailSide::upper ? w2 >= threshold : w2 <= threshold) ++hits;
  }
  const double freq = static_cast<double>(hits) / static_cast<double>(num_mc);
  return {freq, proportion_std_error(freq, num_mc), bound};
}

}  // namespace mdl
