#pragma once

// Independent reference computations used by the unit tests. Each one takes a
// different route from the library code it checks: dense inversion instead of
// rank-one updates, a general (nonsymmetric) eigensolver, brute-force search,
// explicit enumeration, and direct sampling of the defining integrals.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mdl/mdl.hpp"

namespace oracle {

/// (A + c dᵀ)⁻¹ by partial-pivot LU of the dense matrix.
inline Eigen::MatrixXd dense_inverse_update(const Eigen::MatrixXd& a, const Eigen::VectorXd& c,
                                            const Eigen::VectorXd& d) {
  const Eigen::MatrixXd m = a + c * d.transpose();
  return m.partialPivLu().inverse();
}

/// Smallest real part of the eigenvalues, via the general eigensolver.
inline double min_eig_general(const Eigen::MatrixXd& s) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(s, false);
  return es.eigenvalues().real().minCoeff();
}

/// argmin over a uniform grid of a scalar function.
inline double grid_argmin(const std::function<double(double)>& f, double lo, double hi,
                          double step) {
  double best_x = lo, best = f(lo);
  const long steps = std::lround((hi - lo) / step);
  for (long k = 1; k <= steps; ++k) {
    const double x = lo + step * static_cast<double>(k);
    const double v = f(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }
  return best_x;
}

/// Σ_{z ∈ ℤ^p, ‖z‖₁ <= max_l1} exp(-β L(z)), enumerating integer vectors.
inline double kraft_enumerated(long p, int max_l1, double beta) {
  double total = 0.0;
  std::vector<std::int64_t> z(static_cast<std::size_t>(p), 0);
  std::function<void(long, int)> rec = [&](long j, int budget) {
    if (j == p) {
      total += std::exp(-beta * mdl::grid_codelength(z, p, beta));
      return;
    }
    for (int v = -budget; v <= budget; ++v) {
      z[static_cast<std::size_t>(j)] = v;
      rec(j + 1, budget - std::abs(v));
    }
    z[static_cast<std::size_t>(j)] = 0;
  };
  rec(0, max_l1);
  return total;
}

struct McMean {
  double mean;
  double se;
};

/// E_{(x,y) ~ p*}[g(log p_θ/p*)] by direct simulation of the joint law, with
/// the log-likelihood ratio written out from the Gaussian densities.
inline McMean joint_expectation(const mdl::GaussianLinearModel& model, const Eigen::VectorXd& theta,
                                std::uint64_t samples, std::uint64_t seed,
                                const std::function<double(double)>& g) {
  mdl::NormalSampler rng(mdl::substream(seed, {0x4f52ULL}));
  const Eigen::MatrixXd root = model.sqrt_covariance().matrix();
  const double sd = std::sqrt(model.sigma2());
  mdl::RunningStats stats;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Eigen::VectorXd x = root * rng.vector(model.dim());
    const double y = x.dot(model.theta_star()) + sd * rng();
    const double r_true = y - x.dot(model.theta_star());
    const double r_alt = y - x.dot(theta);
    const double log_ratio = (r_true * r_true - r_alt * r_alt) / (2.0 * model.sigma2());
    stats.push(g(log_ratio));
  }
  return {stats.mean(), stats.std_error()};
}

/// Splits a CSV document into rows of fields (no quoting is produced by the
/// writers, so a plain split is exact).
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

}  // namespace oracle
