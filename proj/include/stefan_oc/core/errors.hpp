#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stefan_oc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value. `field()` names the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error("invalid '" + field + "': " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A function was evaluated outside the region where it is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The initial point of a DAE could not be made consistent.
class InitializationError : public Error {
 public:
  InitializationError(const std::string& what, double residual_norm)
      : Error(what), residual_norm_(residual_norm) {}

  double residual_norm() const noexcept { return residual_norm_; }

 private:
  double residual_norm_;
};

/// The adaptive integrator could not advance. Carries the last accepted point.
class IntegrationFailure : public Error {
 public:
  IntegrationFailure(const std::string& what, double tau, std::vector<double> last_state)
      : Error(what), tau_(tau), last_state_(std::move(last_state)) {}

  double tau() const noexcept { return tau_; }
  const std::vector<double>& last_state() const noexcept { return last_state_; }

 private:
  double tau_;
  std::vector<double> last_state_;
};

/// Newton iteration on a collocation element stagnated.
class CollocationFailure : public Error {
 public:
  CollocationFailure(const std::string& what, double residual_norm, std::size_t element, double tau)
      : Error(what), residual_norm_(residual_norm), element_(element), tau_(tau) {}

  double residual_norm() const noexcept { return residual_norm_; }
  std::size_t element() const noexcept { return element_; }
  double tau() const noexcept { return tau_; }

 private:
  double residual_norm_;
  std::size_t element_;
  double tau_;
};

/// Hybrid simulation switched regimes more often than allowed.
class SwitchingError : public Error {
 public:
  using Error::Error;
};

}  // namespace stefan_oc
