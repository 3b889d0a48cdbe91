#pragma once

#include <stdexcept>
#include <string>

namespace gurevich {

/// Base class of every error raised by the library. The CLI maps these to
/// exit code 2 (numeric failure).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite coordinates or values outside an operation's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Requested feature is outside what the implementation covers
/// (derivative orders > 2, potentials deeper than 2, sliding motion, ...).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// A switching-manifold point whose contact order exceeds two.
class ClassificationError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double last_valid_time)
      : Error(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

/// Not enough symbols / branch choices for the requested horizon.
class HorizonError : public Error {
 public:
  using Error::Error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace gurevich
