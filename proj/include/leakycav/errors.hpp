#pragma once

#include <stdexcept>
#include <string>

namespace leakycav {

// Bad input: maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Root bracketing, poles, overflow, integrator failure: exit code 2.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace leakycav
