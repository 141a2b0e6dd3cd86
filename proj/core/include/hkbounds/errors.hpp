#pragma once

#include <stdexcept>
#include <string>

namespace hkb {

/// Precondition or argument violation reported to the caller.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative method hit its iteration cap.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A spectral sum could not be truncated within its accuracy guarantee.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A bound template was used before its constant was calibrated.
class Uncalibrated : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hkb
