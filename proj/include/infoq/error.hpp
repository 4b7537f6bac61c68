#pragma once

#include <stdexcept>
#include <string>

namespace infoq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates its positivity / range constraint.
class InvalidParams : public Error {
public:
  using Error::Error;
};

/// The birth-death chain is not positive recurrent: (1-p)*rho >= 1.
class UnstableRegime : public Error {
public:
  using Error::Error;
};

/// An operation was called outside the domain it is defined on.
class DomainError : public Error {
public:
  using Error::Error;
};

/// The closed-form equilibrium does not apply; use the bisection solver.
class NeedsBisection : public Error {
public:
  using Error::Error;
};

/// The simulated queue exceeded its state cap.
class DivergenceDetected : public Error {
public:
  using Error::Error;
};

}  // namespace infoq
