#pragma once

#include <stdexcept>
#include <string>

namespace gane {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input file could not be parsed; message carries file and line number.
struct ParseError : Error {
  using Error::Error;
};

// Structurally invalid data (self-loop, duplicate edge, bad weight, ...).
struct ValidationError : Error {
  using Error::Error;
};

// Train/test split cannot satisfy the vertex-coverage requirement.
struct SplitError : Error {
  using Error::Error;
};

// An operation was called outside its contract (empty batch, size mismatch,
// non-finite gradient, ...).
struct ContractError : Error {
  using Error::Error;
};

}  // namespace gane
