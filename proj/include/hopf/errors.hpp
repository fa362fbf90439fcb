#pragma once

#include <stdexcept>
#include <string>

namespace hopf {

/// Argument outside the domain of a coefficient, closed form or residual.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative solver ran out of budget before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual_norm)
      : std::runtime_error(what), residual_norm_(residual_norm) {}

  double residual_norm() const noexcept { return residual_norm_; }

 private:
  double residual_norm_;
};

}  // namespace hopf
