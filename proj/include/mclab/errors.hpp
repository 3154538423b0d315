#pragma once

#include <stdexcept>
#include <string>

namespace mclab {

/// Base class for all mclab errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A kernel row does not sum to one, or an entry is outside [0,1] / non-finite.
class NonStochasticKernel : public Error {
 public:
  using Error::Error;
};

/// Reducible kernel without a user-supplied stationary law.
class NoUniqueStationaryLaw : public Error {
 public:
  using Error::Error;
};

/// The stationary law assigns zero mass to some state; the adjoint kernel is
/// undefined there. Restrict the state set first.
class ZeroMassState : public Error {
 public:
  using Error::Error;
};

/// Supplied stationary vector fails validation (not a fixed probability vector).
class InvalidStationaryLaw : public Error {
 public:
  using Error::Error;
};

/// Chain-spec file could not be parsed; message carries a field diagnostic.
class SpecParseError : public Error {
 public:
  using Error::Error;
};

/// A lookup beyond the precomputed horizon of an operator table.
class HorizonExceeded : public Error {
 public:
  using Error::Error;
};

/// The convergence classifier needs at least 64 terms.
class TooFewTerms : public Error {
 public:
  using Error::Error;
};

/// I - Q is singular on the zero-mean subspace; no closed-form variance.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// Vector arguments of mismatched length.
class LengthMismatch : public Error {
 public:
  using Error::Error;
};

/// Request exceeds a configured resource cap (CLI maps this to exit code 3).
class ResourceCap : public Error {
 public:
  using Error::Error;
};

}  // namespace mclab
