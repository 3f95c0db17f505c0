#pragma once

#include <stdexcept>
#include <string>

namespace spikelab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid user input (config file, CLI flags, malformed parameters). Maps to exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

// Grid/domain incompatibilities: grid too coarse, domain touching the grid border.
struct GridError : Error {
  using Error::Error;
};

// Nehari projection failures. NotInU is expected behavior in the competitive
// regime (no positive multiple on the constraint set), not a bug.
struct ProjectionError : Error {
  enum class Kind { zero_component, not_in_u };
  ProjectionError(Kind k, const std::string& msg) : Error(msg), kind(k) {}
  Kind kind;
};

// Profile placement would leave the domain.
struct PlacementError : Error {
  using Error::Error;
};

// Radial shooting oracle could not bracket or integrate.
struct OracleError : Error {
  using Error::Error;
};

// Rescaled comparison window misses too much of the field's mass.
struct WindowError : Error {
  using Error::Error;
};

// Configuration sampling exhausted its rejection budget (r too large for the domain).
struct SamplingError : Error {
  using Error::Error;
};

// Iterative solver diagnostics (nonconvergence, lost continuation branch, ...).
struct SolveError : Error {
  using Error::Error;
};

}  // namespace spikelab
