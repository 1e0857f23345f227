#pragma once

#include <stdexcept>
#include <string>

namespace lassokit {

/// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when vector/matrix sizes disagree. The message names the dimension.
class DimensionError : public Error {
public:
  DimensionError(const std::string &what, long expected, long actual)
      : Error(what + ": expected " + std::to_string(expected) + ", got " +
              std::to_string(actual)),
        expected_(expected), actual_(actual) {}

  long expected() const noexcept { return expected_; }
  long actual() const noexcept { return actual_; }

private:
  long expected_;
  long actual_;
};

class DomainError : public Error {
public:
  using Error::Error;
};

namespace detail {

inline void check_dim(const char *what, long expected, long actual) {
  if (expected != actual)
    throw DimensionError(what, expected, actual);
}

} // namespace detail
} // namespace lassokit
