#pragma once

#include <stdexcept>
#include <string>

namespace mdl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside an operation's mathematical domain (bad order, ε, β, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// Matrix is singular, or a rank-one update has a vanishing denominator.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Penalty coefficients below the minimum needed for the regret certificate.
class InvalidCertificateError : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling on the typical set accepted too few designs.
class InsufficientAcceptanceError : public Error {
 public:
  using Error::Error;
};

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace mdl
