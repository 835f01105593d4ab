#pragma once

#include <stdexcept>
#include <string>

namespace pfc {

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input points are affinely dependent (coplanar or collinear).
struct DegenerateInput : Error {
  using Error::Error;
};

/// Ray is parallel to the plane or points away from it.
struct NoIntersection : Error {
  using Error::Error;
};

/// Contact set outside the supported 1..2 range.
struct InvalidContacts : Error {
  using Error::Error;
};

/// Edge wrenches are parallel, no plane normal can be formed.
struct ParallelEdges : Error {
  using Error::Error;
};

/// Coplanarity plane has no moment component, projection is unsolvable.
struct SingularPlane : Error {
  using Error::Error;
};

/// A body vertex sits below the contact surface beyond the snap tolerance.
struct Penetration : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

/// No static initialization sample could be obtained.
struct InitFailure : Error {
  using Error::Error;
};

/// Cone finalization requires at least 4 edges.
struct TooFewEdges : Error {
  using Error::Error;
};

/// Face labels are not a permutation of {sl, sr, cw, ccw}.
struct LabelConflict : Error {
  using Error::Error;
};

struct UnknownMode : Error {
  using Error::Error;
};

}  // namespace pfc
