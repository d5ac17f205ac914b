#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "model.hpp"
#include "rng.hpp"

namespace mdl::instances {

/// Well-conditioned random SPD matrix G Gᵀ/p + shift·I.
inline Eigen::MatrixXd random_spd(NormalSampler& rng, Eigen::Index p, double shift = 0.5) {
  const Eigen::MatrixXd g = rng.matrix(p, p);
  return g * g.transpose() / static_cast<double>(p) + shift * Eigen::MatrixXd::Identity(p, p);
}

inline Eigen::MatrixXd random_symmetric(NormalSampler& rng, Eigen::Index p) {
  const Eigen::MatrixXd g = rng.matrix(p, p);
  return 0.5 * (g + g.transpose());
}

/// Random model with σ² in [0.5, 2] and a random SPD Σ.
inline GaussianLinearModel random_model(NormalSampler& rng, Eigen::Index p) {
  const double sigma2 = 0.5 + 1.5 * rng.uniform();
  return GaussianLinearModel(rng.vector(p), sigma2, matops::SpdMatrix(random_spd(rng, p)));
}

/// θ with ‖Σ^{1/2}(θ - θ*)‖² = ratio · σ², in a random direction.
inline Eigen::VectorXd displaced_theta(NormalSampler& rng, const GaussianLinearModel& model,
                                       double ratio) {
  Eigen::VectorXd dir = rng.vector(model.dim());
  const double q = model.quad_form(dir);
  return model.theta_star() + dir * std::sqrt(ratio * model.sigma2() / q);
}

}  // namespace mdl::instances
