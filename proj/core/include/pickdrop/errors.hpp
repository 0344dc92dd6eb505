#pragma once

#include <stdexcept>
#include <string>

namespace pickdrop {

// Base class for every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An input violates a documented precondition (bad dimensions, non-finite
// values, non-unit vectors, malformed arguments).
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// An operation was called in the wrong object state, e.g. ingesting into a
// finalized map or querying before finalize.
class StateError : public Error {
 public:
  using Error::Error;
};

// The semantic map holds no entries.
class EmptyMapError : public Error {
 public:
  using Error::Error;
};

// No candidate standing cell exists for the requested object.
class UnreachableTargetError : public Error {
 public:
  using Error::Error;
};

// The goal cell cannot be reached from the start cell.
class NoPathError : public Error {
 public:
  using Error::Error;
};

// No grasp proposal survived filtering / an empty proposal set was ranked.
class NoGraspError : public Error {
 public:
  using Error::Error;
};

// The segmented receptacle cloud is empty.
class NoReceptacleError : public Error {
 public:
  using Error::Error;
};

// The receptacle cloud has no point inside the drop eligibility slab.
class DegenerateReceptacleError : public Error {
 public:
  using Error::Error;
};

// A file or stream could not be decoded.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace pickdrop
