#pragma once

#include <stdexcept>
#include <string>

namespace dwlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// |theta| >= 1 or |rho| >= 1.
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// A parameter lies outside its admissible domain (variance, shape, speed exponent...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A path carries no information, e.g. S_{n-1} = 0 or J_{n-1} = 0.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// A covariance or limit matrix is singular (theta = -rho).
class SingularError : public Error {
 public:
  using Error::Error;
};

/// Too few tail events to estimate a deviation probability.
class InsufficientEventsError : public Error {
 public:
  using Error::Error;
};

}  // namespace dwlab
