#pragma once

#include <stdexcept>
#include <string>

namespace pwave {

/// Invalid user input: malformed descriptors, violated preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure left its domain of validity (drift, degenerate metric).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver stopped without meeting its tolerances.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_value, double residual)
      : std::runtime_error(what), last_value_(last_value), residual_(residual) {}

  double last_value() const { return last_value_; }
  double residual() const { return residual_; }

 private:
  double last_value_;
  double residual_;
};

}  // namespace pwave
