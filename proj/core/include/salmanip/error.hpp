#pragma once

#include <stdexcept>
#include <string>

namespace salmanip {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The caller supplied something invalid: bad dimensions, out-of-range
/// parameters, unreadable files, degenerate regions.
class InputError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver gave up before reaching its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace salmanip
