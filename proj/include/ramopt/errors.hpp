#pragma once

#include <stdexcept>
#include <string>

namespace ramopt {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shape / size disagreement between operands.
struct DimensionError : Error {
  using Error::Error;
};

/// A tangent vector was used at a point other than its base.
struct BaseMismatchError : Error {
  using Error::Error;
};

/// Domain failure inside a geometry operation (rank-deficient retraction,
/// ambiguous truncation, antipodal transport, loss of positive-definiteness).
/// Solvers may retry the step with a safeguarded direction after catching this.
struct GeometryError : Error {
  using Error::Error;
};

/// Matrix function applied outside its domain; carries the offending
/// smallest eigenvalue.
struct SpdDomainError : GeometryError {
  SpdDomainError(const std::string& msg, double lmin)
      : GeometryError(msg), lambda_min(lmin) {}
  double lambda_min;
};

/// Operation not available on this geometry (dist, parallel transport).
struct UnsupportedError : Error {
  using Error::Error;
};

/// File / stream failure; message carries the path.
struct IoError : Error {
  using Error::Error;
};

}  // namespace ramopt
