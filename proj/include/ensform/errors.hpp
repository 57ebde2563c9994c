#pragma once

#include <stdexcept>
#include <string>

namespace ensform {

/// Malformed or schema-violating input (CLI exit code 64).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A theorem hypothesis does not hold for the given instance (CLI exit code 2):
/// graph not strongly connected, N <= n+1, parameterization functions failing
/// separation / nonzero requirements, configurations leaving the nondegenerate set.
struct HypothesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An enumeration guard was exceeded (CLI exit code 3).
struct ResourceCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numerical stage failed: residual above tolerance, non-finite state,
/// independence check failure (CLI exit code 1).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ensform
