#ifndef TOA_ERRORS_HPP
#define TOA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace toa {

/// Invalid user input (non-positive parameter, bad grid, bad tolerance).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a map, e.g. xi > x/sigma.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Adaptive quadrature could not meet its tolerance within budget.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double partial_value, double partial_error)
      : std::runtime_error(what), partial_value_(partial_value), partial_error_(partial_error) {}

  double partial_value() const noexcept { return partial_value_; }
  double partial_error() const noexcept { return partial_error_; }

 private:
  double partial_value_;
  double partial_error_;
};

}  // namespace toa

#endif  // TOA_ERRORS_HPP
