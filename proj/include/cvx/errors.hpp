#pragma once

#include <stdexcept>
#include <string>

namespace cvx {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// zeta is not in the image of S, so {y : Sy = zeta} is empty.
class InfeasibleFiber : public Error {
 public:
  using Error::Error;
};

/// Marginal query point outside Im(S^T).
class DomainViolation : public Error {
 public:
  using Error::Error;
};

/// The inner minimum is not attained: the LP keeps improving as the box grows.
class UnboundedBelow : public Error {
 public:
  using Error::Error;
};

class SingularKKT : public Error {
 public:
  using Error::Error;
};

class NotStrictlyConvex : public Error {
 public:
  using Error::Error;
};

class NotConvex : public Error {
 public:
  using Error::Error;
};

class InfeasibleDomain : public Error {
 public:
  using Error::Error;
};

class FiberTooLarge : public Error {
 public:
  using Error::Error;
};

class UnsupportedFamily : public Error {
 public:
  using Error::Error;
};

/// A documented precondition was not met (zero direction, empty direction set, ...).
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

inline void require_dims(long expected, long actual, const char* what) {
  if (expected != actual) {
    throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(expected) +
                            ", got " + std::to_string(actual));
  }
}

}  // namespace cvx
