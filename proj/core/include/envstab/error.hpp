#pragma once

#include <stdexcept>
#include <string>

namespace envstab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point fell outside the domain of a map, or a derivative is undefined there.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Parameters outside a family's admissible region, or a malformed system.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Bracketing failures in the root finders.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Configuration file problems. `line()` is 1-based, 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace envstab
