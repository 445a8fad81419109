#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace decohere {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions do not fit the requested operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An input that must be Hermitian (or a density operator) is not.
class NotHermitianError : public Error {
 public:
  using Error::Error;
};

/// A parameter lies outside its physical domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A linear system is singular to working precision.
class SingularError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver hit its iteration cap. Carries the residual history.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double best_residual,
                      std::vector<double> residual_trace)
      : Error(what),
        best_residual_(best_residual),
        residual_trace_(std::move(residual_trace)) {}

  double best_residual() const noexcept { return best_residual_; }
  const std::vector<double>& residual_trace() const noexcept {
    return residual_trace_;
  }

 private:
  double best_residual_;
  std::vector<double> residual_trace_;
};

/// The selected spectral subspace is not the graph of any operator X.
class NoGraphRepresentationError : public Error {
 public:
  using Error::Error;
};

/// The spectral cut falls inside a (near-)degenerate cluster.
class AmbiguousSubspaceError : public Error {
 public:
  using Error::Error;
};

/// Scenario document failed validation.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Environment dimension exceeds the dense-algebra cap.
class DimensionCapError : public Error {
 public:
  using Error::Error;
};

/// Initial matrix is not a density operator.
class InvalidStateError : public Error {
 public:
  using Error::Error;
};

}  // namespace decohere
