#pragma once

#include <stdexcept>
#include <string>

namespace sbe {

/// Base class for every error raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was not met (bad grid size, negative dt, ...).
struct InvalidArgument : Error {
  using Error::Error;
};

/// A density target at or beyond the Pauli saturation limit of the grid.
struct SaturationError : Error {
  using Error::Error;
};

/// A functional was evaluated outside its domain, e.g. f touching 0 or 1.
struct DomainError : Error {
  using Error::Error;
};

/// A conserved quantity or bound was broken during evolution.
struct InvariantViolation : Error {
  using Error::Error;
};

/// Malformed config, CSV, snapshot or kernel file.
struct FormatError : Error {
  using Error::Error;
};

}  // namespace sbe
