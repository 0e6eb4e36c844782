#pragma once

#include <stdexcept>
#include <string>

namespace lidarsynth {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A buffer value cannot be decoded (e.g. a depth value below the valid range).
class CorruptBuffer : public Error {
 public:
  using Error::Error;
};

/// A file on disk is truncated, malformed, or inconsistent with its siblings.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace lidarsynth
