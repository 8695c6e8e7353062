#pragma once

#include <stdexcept>
#include <string>

namespace cascade {

/// Malformed arguments: wrong shapes, non-Hermitian input, invalid physical parameters.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures of the numerical pipeline itself.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(const std::string& what, double condition_estimate)
      : NumericalError(what), condition_estimate_(condition_estimate) {}

  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

class NonUniqueSteadyStateError : public NumericalError {
 public:
  NonUniqueSteadyStateError(const std::string& what, int null_dimension)
      : NumericalError(what), null_dimension_(null_dimension) {}

  int null_dimension() const noexcept { return null_dimension_; }

 private:
  int null_dimension_;
};

class NoOscillationError : public NumericalError {
 public:
  NoOscillationError(const std::string& what, double improvement)
      : NumericalError(what), improvement_(improvement) {}

  double improvement() const noexcept { return improvement_; }

 private:
  double improvement_;
};

/// A correlation was requested for a line whose steady-state intensity vanishes.
class UndefinedNormalizationError : public std::runtime_error {
 public:
  UndefinedNormalizationError(const std::string& what, std::string line)
      : std::runtime_error(what), line_(std::move(line)) {}

  const std::string& line() const noexcept { return line_; }

 private:
  std::string line_;
};

}  // namespace cascade
