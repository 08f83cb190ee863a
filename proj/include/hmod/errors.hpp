#pragma once

#include <stdexcept>
#include <string>

namespace hmod {

// Precondition violations: bad parameters handed to a library operation.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent run configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative estimator hit its cap without meeting tolerance (CLI exit code 3).
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hmod
