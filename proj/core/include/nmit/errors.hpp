#pragma once

#include <stdexcept>
#include <string>

namespace nmit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input. `field()` names the offending parameter or config key.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// cos(2k x_ns) <= 0: the optical potential has no curvature to trap the sphere.
class UnstableTrapError : public Error {
 public:
  using Error::Error;
};

/// The Coulomb force exceeds the largest optical restoring force.
class NoTrapSolutionError : public Error {
 public:
  using Error::Error;
};

class IterationLimitError : public Error {
 public:
  IterationLimitError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// Singular response system or diverging trajectory.
class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& what, double magnitude)
      : Error(what), magnitude_(magnitude) {}
  /// Determinant magnitude (linear solves) or state magnitude (integration).
  double magnitude() const noexcept { return magnitude_; }

 private:
  double magnitude_;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nmit
