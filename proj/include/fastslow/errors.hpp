#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fastslow {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by caller-supplied data (CLI exit code 2).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Evaluating a term with a negative power of eps at eps = 0.
class SingularEvaluation : public Error {
 public:
  using Error::Error;
};

class NotImplemented : public Error {
 public:
  using Error::Error;
};

/// Least-squares order fit on errors that sit at round-off level.
class DegenerateFit : public Error {
 public:
  using Error::Error;
};

class BracketError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double estimate)
      : Error(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

}  // namespace fastslow
