#pragma once

#include <stdexcept>
#include <string>

namespace collapse {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-range user input (tables, configs, parameters).
class InputError : public Error {
 public:
  using Error::Error;
};

// A query that is mathematically undefined at the requested point:
// conditioning on a null event, null density, a non-differentiable point.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Quadrature, differencing or root finding failed to reach its tolerance.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double estimate, double error_bound)
      : Error(what), estimate_(estimate), error_bound_(error_bound) {}
  explicit NumericalError(const std::string& what) : NumericalError(what, 0.0, 0.0) {}

  double estimate() const { return estimate_; }
  double error_bound() const { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

}  // namespace collapse
