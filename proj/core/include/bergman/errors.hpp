#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bergman {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A matrix expected to be positive definite was not; carries the pivot
/// (0-based) at which the Cholesky factorization failed.
struct DefinitenessError : Error {
  int pivot;
  explicit DefinitenessError(int pivot_, const std::string& what_)
      : Error(what_), pivot(pivot_) {}
};

/// A point lies outside the domain an operation requires.
struct DomainError : Error {
  using Error::Error;
};

/// An argument violates a precondition (|a| >= 1, lambda <= 0, ...).
struct ParameterError : Error {
  using Error::Error;
};

/// Evaluation at a singular configuration (e.g. <z,w> = 1 for the ball kernel).
struct SingularityError : Error {
  using Error::Error;
};

/// Gram matrix too ill-conditioned to invert; carries eigenvalue ratio.
struct ConditioningError : Error {
  double eigenvalue_ratio;
  ConditioningError(double ratio, const std::string& what_)
      : Error(what_), eigenvalue_ratio(ratio) {}
};

/// A derivative stencil would leave the domain of holomorphy.
struct GeometryError : Error {
  using Error::Error;
};

/// An integration engine produced no usable samples.
struct SamplingError : Error {
  using Error::Error;
};

/// log K(z,p) required where K(z,p) = 0.
struct ZeroDivisorError : Error {
  using Error::Error;
};

/// A scenario or config file is malformed; lists what is missing.
struct ValidationError : Error {
  std::vector<std::string> missing;
  explicit ValidationError(std::vector<std::string> missing_,
                           const std::string& what_)
      : Error(what_), missing(std::move(missing_)) {}
};

}  // namespace bergman
