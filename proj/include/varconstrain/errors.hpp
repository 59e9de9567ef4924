#pragma once

#include <stdexcept>
#include <string>

namespace varconstrain {

// Caller violated an interface contract (bad dimensions, mismatched kinds, bad config).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numeric computation produced or would produce a non-finite result.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularityError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DomainError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace varconstrain
