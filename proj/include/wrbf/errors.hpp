#pragma once

#include <stdexcept>
#include <string>

namespace wrbf {

// Every failure raised by the library derives from Error so callers can
// catch a single type at the process boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class InvalidNodesError : public Error {
 public:
  using Error::Error;
};

class FactorizationError : public Error {
 public:
  FactorizationError(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition_estimate() const noexcept { return condition_; }

 private:
  double condition_;
};

class SingularPointError : public Error {
 public:
  using Error::Error;
};

class StateError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

class OracleError : public Error {
 public:
  OracleError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Raised by the time integrators when a stage produces non-finite values.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double t, int stage) : Error(what), t_(t), stage_(stage) {}
  double time() const noexcept { return t_; }
  int stage() const noexcept { return stage_; }

 private:
  double t_;
  int stage_;
};

// Carries the last finite state of the trajectory.
template <class State>
class BlowUp : public BlowUpError {
 public:
  BlowUp(const std::string& what, double t, int stage, State last)
      : BlowUpError(what, t, stage), last_state_(std::move(last)) {}
  const State& last_state() const noexcept { return last_state_; }

 private:
  State last_state_;
};

}  // namespace wrbf
