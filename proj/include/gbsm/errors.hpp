#pragma once

#include <stdexcept>

namespace bisim {

/// Argument outside its documented range (bad branching factor, negative
/// tolerance, map index out of bounds, ...).
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Two objects that must agree on shape or discount do not.
struct IncompatibilityError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Malformed serialized data, or data violating a model invariant on load.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A state that valid inputs cannot produce (solver non-convergence,
/// post-construction invariant failure).
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

/// A certified inequality failed its re-check before being written out.
struct SoundnessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bisim
