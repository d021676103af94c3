#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rpsde {

/// Base of every exception thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A specification or argument violates its documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A time that should lie on the simulation grid does not.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// Two objects built on different grids or periods were combined.
class GridMismatchError : public Error {
 public:
  using Error::Error;
};

/// An optional model capability (Jacobian, right inverse, d = 1, ...) is missing.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// A Lyapunov function was evaluated where its derivatives do not exist.
class SingularityError : public Error {
 public:
  using Error::Error;
};

class EmptyEnsembleError : public Error {
 public:
  using Error::Error;
};

/// The numerical state became non-finite. `step()` is the absolute grid
/// index of the first step whose result was not finite.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::int64_t step)
      : Error(what), step_(step) {}
  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

/// The pullback sequence did not reach the requested tolerance.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> gaps)
      : Error(what), gaps_(std::move(gaps)) {}
  const std::vector<double>& gaps() const noexcept { return gaps_; }

 private:
  std::vector<double> gaps_;
};

/// A CSV file does not carry one of the recognized headers.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace rpsde
