#pragma once

#include <stdexcept>
#include <string>

namespace signn {

// Error taxonomy shared by the library and the CLI.  The CLI maps these to
// process exit codes: config/usage -> 2, data/state -> 3, numeric -> 4.

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Incompatible matrix shapes fed into an operation.
struct DimensionError : Error {
  using Error::Error;
};

// Invalid configuration values (bad ratios, empty intervals, ...).
struct ConfigError : Error {
  using Error::Error;
};

// Malformed or missing input data (files, labels, checkpoints).
struct DataError : Error {
  using Error::Error;
};

// Index outside its documented range (steps, labels, node ids).
struct RangeError : Error {
  using Error::Error;
};

// Non-finite values where finite ones are required.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace signn
