#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "error.hpp"

namespace mdl::matops {

inline constexpr double kSymmetryTolerance = 1e-12;
/// Eigenvalues at or below this fraction of the largest one count as zero.
inline constexpr double kSingularityClamp = 1e-12;
inline constexpr double kSingularUpdateThreshold = 1e-12;

/// max |S - S^T| <= tol * max(1, max |S|).
inline bool is_symmetric(const Eigen::MatrixXd& s, double tol = kSymmetryTolerance) {
  if (s.rows() != s.cols()) return false;
  if (s.size() == 0) return true;
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  return (s - s.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols())
    throw DimensionError("matrix must be square, got " + std::to_string(s.rows()) + "x" +
                         std::to_string(s.cols()));
  if (!is_symmetric(s))
    throw SymmetryError("matrix is not symmetric within relative tolerance 1e-12");
  return 0.5 * (s + s.transpose());
}

class SpdMatrix;
inline SpdMatrix sqrt_sym(const SpdMatrix& s);

/// Symmetric positive-definite matrix. Construction validates; the stored
/// entries are exactly symmetric.
class SpdMatrix {
 public:
  explicit SpdMatrix(const Eigen::MatrixXd& s) : m_(symmetrized(s)) {
    if (m_.rows() == 0) throw DimensionError("SpdMatrix must have dimension >= 1");
    Eigen::VectorXd ev;
    if (is_diagonal()) {
      ev = m_.diagonal();
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m_, Eigen::EigenvaluesOnly);
      ev = es.eigenvalues();
    }
    if (ev.maxCoeff() <= 0.0 || ev.minCoeff() <= kSingularityClamp * ev.maxCoeff())
      throw SingularMatrixError("matrix is not strictly positive definite");
  }

  static SpdMatrix identity(Eigen::Index dim) {
    return SpdMatrix(Eigen::MatrixXd::Identity(dim, dim));
  }

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  bool is_diagonal() const {
    for (Eigen::Index j = 0; j < m_.cols(); ++j)
      for (Eigen::Index i = 0; i < m_.rows(); ++i)
        if (i != j && m_(i, j) != 0.0) return false;
    return true;
  }

 private:
  struct Trusted {};
  SpdMatrix(Eigen::MatrixXd m, Trusted) : m_(std::move(m)) {}
  friend SpdMatrix sqrt_sym(const SpdMatrix& s);

  Eigen::MatrixXd m_;
};

/// Symmetric square root via eigendecomposition: R = V diag(sqrt(l)) V^T.
inline SpdMatrix sqrt_sym(const SpdMatrix& s) {
  if (s.is_diagonal()) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(s.dim(), s.dim());
    r.diagonal() = s.matrix().diagonal().cwiseSqrt();
    return SpdMatrix(std::move(r), SpdMatrix::Trusted{});
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.matrix());
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  if (ev.minCoeff() <= kSingularityClamp * ev.maxCoeff())
    throw SingularMatrixError("sqrt_sym: matrix is singular to working precision");
  const Eigen::MatrixXd& v = es.eigenvectors();
  Eigen::MatrixXd r = v * ev.cwiseSqrt().asDiagonal() * v.transpose();
  return SpdMatrix(0.5 * (r + r.transpose()), SpdMatrix::Trusted{});
}

inline Eigen::MatrixXd sqrt_sym(const Eigen::MatrixXd& s) {
  return sqrt_sym(SpdMatrix(s)).matrix();
}

/// (A + c d^T)^{-1} from A^{-1}:  A^{-1} - A^{-1} c d^T A^{-1} / (1 + d^T A^{-1} c).
inline Eigen::MatrixXd sherman_morrison(const Eigen::MatrixXd& a_inv, const Eigen::VectorXd& c,
                                        const Eigen::VectorXd& d) {
  require_dims(a_inv.rows() == a_inv.cols(), "sherman_morrison: A^{-1} must be square");
  require_dims(c.size() == a_inv.rows() && d.size() == a_inv.rows(),
               "sherman_morrison: update vectors must match the matrix dimension");
  const Eigen::VectorXd ainv_c = a_inv * c;
  const Eigen::RowVectorXd dt_ainv = d.transpose() * a_inv;
  const double denom = 1.0 + d.dot(ainv_c);
  if (std::abs(denom) <= kSingularUpdateThreshold)
    throw SingularMatrixError("sherman_morrison: 1 + d^T A^{-1} c vanishes");
  return a_inv - (ainv_c * dt_ainv) / denom;
}

inline Eigen::MatrixXd sherman_morrison(const SpdMatrix& a_inv, const Eigen::VectorXd& c,
                                        const Eigen::VectorXd& d) {
  return sherman_morrison(a_inv.matrix(), c, d);
}

inline double min_eigenvalue(const Eigen::MatrixXd& s) {
  const Eigen::MatrixXd sym = symmetrized(s);
  if (sym.rows() == 0) throw DimensionError("min_eigenvalue: empty matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  return es.eigenvalues().minCoeff();
}

}  // namespace mdl::matops
