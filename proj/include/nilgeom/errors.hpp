#pragma once

#include <stdexcept>
#include <string>

namespace nilgeom {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Structurally invalid input: wrong sizes, bad indices, unparseable files.
class MalformedInput : public Error {
public:
  using Error::Error;
};

/// An operation was called on data violating its precondition.
/// `residual` carries the measured defect when one exists.
class PreconditionError : public Error {
public:
  PreconditionError(const std::string &what, double residual = 0.0)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

/// An internal identity that must hold numerically failed.
class IntegrityError : public Error {
public:
  IntegrityError(const std::string &what, double residual = 0.0)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

/// Iterative solver stopped without meeting its target.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string &what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

} // namespace nilgeom
