#pragma once

#include <stdexcept>
#include <string>

namespace whitenet {

/// Invalid numerical input: NaN/Inf entries, undersized batches, bad shapes.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigendecomposition or other factorization failure.
class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Experiment configuration rejected at validation time (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite loss encountered during training (CLI exit code 3).
class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File I/O failure, message carries the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace whitenet
