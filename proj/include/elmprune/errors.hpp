#pragma once

#include <stdexcept>

namespace elmprune {

/// A caller broke a documented precondition (shape mismatch, empty input, bad argument).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a trustworthy result.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace elmprune
