#pragma once

#include <stdexcept>
#include <string>

namespace klcert {

/// Precondition violated by the caller (out-of-range sizes, infeasible points).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input where the requested map is multivalued, e.g. projecting 0 onto the sphere.
class DegenerateInputError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// Instance exceeds the hard size guard of an exponential-time routine.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Invalid solver configuration (step too large, non-positive tolerances).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A fit could not be carried out; carries whatever was computed before failing.
class EstimationError : public std::runtime_error {
 public:
  EstimationError(const std::string& what, double partial_constant)
      : std::runtime_error(what), partial_constant_(partial_constant) {}

  double partial_constant() const noexcept { return partial_constant_; }

 private:
  double partial_constant_;
};

/// Internal numerical failure (e.g. eigensolver sweep cap reached).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace klcert
