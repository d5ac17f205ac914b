#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace mdl::numdiff {

/// Default step for coordinate j: 1e-5 · max(1, |x_j|).
inline double step_for(double xj, double rel = 1e-5) { return rel * std::max(1.0, std::abs(xj)); }

/// Central-difference gradient of a scalar function.
template <typename F>
Eigen::VectorXd gradient(const F& f, const Eigen::VectorXd& x, double rel = 1e-5) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = step_for(x[j], rel);
    probe[j] = x[j] + h;
    const double up = f(probe);
    probe[j] = x[j] - h;
    const double down = f(probe);
    probe[j] = x[j];
    g[j] = (up - down) / (2.0 * h);
  }
  return g;
}

/// Central-difference Jacobian of a vector function; columns are ∂f/∂x_j.
template <typename F>
Eigen::MatrixXd jacobian(const F& f, const Eigen::VectorXd& x, double rel = 1e-5) {
  Eigen::VectorXd probe = x;
  Eigen::MatrixXd jac;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = step_for(x[j], rel);
    probe[j] = x[j] + h;
    const Eigen::VectorXd up = f(probe);
    probe[j] = x[j] - h;
    const Eigen::VectorXd down = f(probe);
    probe[j] = x[j];
    if (j == 0) jac.resize(up.size(), x.size());
    jac.col(j) = (up - down) / (2.0 * h);
  }
  return jac;
}

/// Second central difference d²f/dx² of a scalar function of one variable.
template <typename F>
double second_derivative(const F& f, double x, double h = 1e-4) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

/// ‖a - b‖ / max(‖b‖, floor).
inline double rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double floor = 1e-12) {
  return (a - b).norm() / std::max(b.norm(), floor);
}

}  // namespace mdl::numdiff
