#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace kbsyk {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters or an off-lattice request.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// An iteration hit its sweep budget. Carries the residual history.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

// NaN or runaway growth, even after damping was reduced to its floor.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class ConventionViolation : public Error {
 public:
  using Error::Error;
};

// The slice does not determine a low-frequency temperature.
class UndefinedTemperatureError : public Error {
 public:
  using Error::Error;
};

class InsufficientWindowError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Both ends of a threshold bracket show the same crossing status.
class BracketError : public Error {
 public:
  using Error::Error;
};

}  // namespace kbsyk
