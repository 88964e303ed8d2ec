#pragma once

#include <stdexcept>
#include <string>

namespace wigner {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Nonphysical state, e.g. non-positive total mass before the correction.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace wigner
