#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace concomitant {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Arguments violate a documented precondition (dimensions, ranges, non-finite values).
class InvalidInput : public Error {
public:
  using Error::Error;
};

/// Point on the boundary of the simplex passed where an interior point is required.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Matrix has no usable spectrum (identically zero).
class DegenerateMatrix : public Error {
public:
  using Error::Error;
};

/// Variogram whose derived covariance is not positive definite.
class InvalidVariogram : public Error {
public:
  using Error::Error;
};

/// Problem too large for exhaustive enumeration.
class Infeasible : public Error {
public:
  using Error::Error;
};

/// A theory check was called on a law that does not meet its assumptions.
class PreconditionError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace concomitant
