#pragma once

#include <stdexcept>
#include <string>

namespace pilotforge {

// Every library failure derives from Error so the CLI can map categories to
// exit codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument values: out-of-range indices, negative targets, mismatched sizes.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Requested shape lies outside the supported K_tot > K > tau scenario.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// SINR targets violate a capacity-region bound or the per-user cap.
class FeasibilityError : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an algorithm does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Operation needs data that has not been produced yet (e.g. gamma_hat).
class StateError : public Error {
 public:
  using Error::Error;
};

// Scenario file could not be parsed or failed validation.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Should be unreachable; indicates a bug or a violated internal invariant.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace pilotforge
