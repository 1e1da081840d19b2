#pragma once

#include <stdexcept>
#include <string>

namespace binpat {

/// Bad input to an operation: empty pattern, out-of-range parameter, etc.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative solver ran out of budget. Carries the best value reached.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_value)
      : std::runtime_error(what), best_value_(best_value) {}
  double best_value() const noexcept { return best_value_; }

 private:
  double best_value_;
};

/// An exponent polynomial that does not define a sublebesgue measure.
class InfeasibleExponent : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace binpat
