#pragma once

#include <stdexcept>
#include <string>

namespace ffrate {

/// Bad argument or malformed input data (maps to CLI exit code 2).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical procedure finished without meeting its target (exit code 3).
class NotConverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ffrate
