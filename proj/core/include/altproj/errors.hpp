#pragma once

#include <stdexcept>
#include <string>

namespace altproj {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operands live in spaces of different dimension.
struct DimensionMismatch : Error {
  using Error::Error;
};

/// A set constructor received data violating its invariants
/// (zero normal, nonpositive radius, empty polyhedron, ...).
struct InvalidSet : Error {
  using Error::Error;
};

/// The active-set solve hit its pivot guard without reaching a
/// verified KKT point.
struct DegenerateKkt : Error {
  using Error::Error;
};

/// KKT enumeration over active subsets produced no candidate with
/// nonnegative multipliers and feasibility.
struct NoKktCandidate : Error {
  using Error::Error;
};

/// Operation is not defined for this set variant.
struct UnsupportedVariant : Error {
  using Error::Error;
};

/// A certificate was requested for an instance whose sets intersect.
struct ConsistentInstance : Error {
  using Error::Error;
};

/// An error-bound report was used in a context requiring a Holds
/// verdict with finite bound.
struct InvalidReport : Error {
  using Error::Error;
};

/// An iteration trace was empty where at least one record is needed.
struct EmptyTrace : Error {
  using Error::Error;
};

/// The iteration diverged, so no attained distance is available.
struct DistanceNotAttained : Error {
  using Error::Error;
};

/// Grid search found no point of the target set inside the search box.
struct NoFeasibleGridPoint : Error {
  using Error::Error;
};

struct UnboundedLp : Error {
  using Error::Error;
};

struct InfeasibleLp : Error {
  using Error::Error;
};

struct DualInfeasible : Error {
  using Error::Error;
};

/// The min-max lower bound beta is not strictly below the optimal value.
struct BetaNotBelowOptimum : Error {
  using Error::Error;
};

struct UnknownExample : Error {
  using Error::Error;
};

/// Problem file / JSON schema violations.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace altproj
