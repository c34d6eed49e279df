#pragma once

#include <stdexcept>
#include <string>

namespace ultraweyl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A cell basis or function resolution too coarse for the requested
/// operation. Carries the minimal adequate (R, S) so callers can retry.
class ResolutionError : public Error {
 public:
  ResolutionError(const std::string& msg, int required_r, int required_s)
      : Error(msg + " (required resolution R=" + std::to_string(required_r) +
              ", S=" + std::to_string(required_s) + ")"),
        required_r(required_r),
        required_s(required_s) {}
  int required_r;
  int required_s;
};

/// Root-of-unity depth exceeds the configured p^M.
class DepthError : public Error {
 public:
  using Error::Error;
};

/// Mixed exact/float scalars in one expression.
class BackendError : public Error {
 public:
  using Error::Error;
};

/// Malformed JSON artifact.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace ultraweyl
