#pragma once

#include <stdexcept>
#include <string>

namespace bigjump {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid family parameters, options or configuration values.
struct ConfigError : Error {
  using Error::Error;
};

// Quadrature or iteration failed to reach its tolerance, or a numerical
// guard (clip bound, overflow) tripped.
struct NumericalError : Error {
  using Error::Error;
};

// Off-grid mass too large for the requested query in strict mode.
struct SpillError : NumericalError {
  using NumericalError::NumericalError;
};

// A boundary search that never satisfies its tolerance (e.g. insensitivity
// of a non-long-tailed law).
struct UnboundedError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace bigjump
