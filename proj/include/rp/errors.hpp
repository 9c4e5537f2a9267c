#pragma once

#include <stdexcept>
#include <string>

namespace rp {

// Shape disagreement between tensors/operands.
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid argument value (bad permutation, modulus out of range, ...).
struct ParameterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Problem instance exceeds a guarded enumeration bound.
struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inconsistent model/run configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed dataset content (labels out of range, ...).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File / serialization failure.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// API misuse (backward on a non-scalar, reading an empty handle, ...).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rp
