#pragma once

#include <stdexcept>
#include <string>

namespace wbg {

/// Argument outside the domain of an operation (x <= 0, non-positive scale, ...).
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
class NonConvergenceError : public std::runtime_error {
public:
  NonConvergenceError(const std::string& what, double estimate, double error)
      : std::runtime_error(what), estimate_(estimate), error_(error) {}
  double estimate() const noexcept { return estimate_; }
  double error() const noexcept { return error_; }

private:
  double estimate_;
  double error_;
};

/// No sign change between the supplied (or scanned) endpoints.
class BracketError : public std::runtime_error {
public:
  explicit BracketError(const std::string& what) : std::runtime_error(what) {}
};

/// A determinant or derivative that must be nonzero has (numerically) vanished.
class SingularityError : public std::runtime_error {
public:
  explicit SingularityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wbg
