#pragma once

#include <stdexcept>
#include <string>

namespace lemsim {

// Exception categories map one-to-one onto the CLI exit codes.

/// A configuration value that violates a documented constraint (exit 1).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable, missing or malformed input data (exit 2).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A conservation or consistency check failed at runtime (exit 3).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace lemsim
