#pragma once

#include <stdexcept>
#include <string>

namespace rpnv {

/// Malformed or inconsistent input (bad schema, wrong dimensions, unsupported spin).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Physically meaningless request: r = 0, k < 0, r2 <= r1, ...
class PhysicsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical check failed: eigendecomposition residual, positivity, sampling guard.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rpnv
