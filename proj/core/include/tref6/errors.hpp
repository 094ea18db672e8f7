#pragma once

#include <stdexcept>

namespace tref6 {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unreadable input (bad JSON/CSV, missing file).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Structurally invalid data or out-of-range arguments.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Triangulation normal equations singular or ill-conditioned.
class DegenerateRays : public Error {
 public:
  using Error::Error;
};

// Neighborhood covariance has no well-separated smallest eigenvalue.
class DegenerateNeighborhood : public Error {
 public:
  using Error::Error;
};

// Interaction direction parallel to the surface normal.
class DegenerateDirection : public Error {
 public:
  using Error::Error;
};

// Quaternion sequence with ambiguous rotation-vector continuity.
class AngleWrap : public Error {
 public:
  using Error::Error;
};

}  // namespace tref6
