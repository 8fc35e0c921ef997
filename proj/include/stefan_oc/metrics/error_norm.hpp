#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "stefan_oc/core/errors.hpp"
#include "stefan_oc/dae/trajectory.hpp"

namespace stefan_oc::metrics {

enum class Quantity { TemperatureRate, InterfaceVelocity };

inline const char* to_string(Quantity q) {
  return q == Quantity::TemperatureRate ? "temperature_rate" : "interface_velocity";
}

struct ErrorSpec {
  Quantity quantity = Quantity::InterfaceVelocity;
  double setpoint = 0.0;
  double d_tau_sample = 0.05;

  void validate() const {
    if (!(d_tau_sample > 0.0 && std::isfinite(d_tau_sample)))
      throw ConfigError("d_tau_sample", "must be > 0");
    if (!std::isfinite(setpoint)) throw ConfigError("setpoint", "must be finite");
  }
};

/// Uniform grid t0, t0 + d, ... not exceeding t1 (with a rounding allowance).
inline std::vector<double> sample_grid(double t0, double t1, double d) {
  std::vector<double> g;
  const double slack = 1e-9 * d;
  for (std::size_t k = 0;; ++k) {
    const double t = t0 + static_cast<double>(k) * d;
    if (t > t1 + slack) break;
    g.push_back(std::min(t, t1));
  }
  return g;
}

/**
 * RMS deviation from the setpoint of the forward-difference rate of a
 * sampled quantity q(tau) on the uniform grid of step spec.d_tau_sample
 * covering [t0, t1].
 */
inline double error_norm(const std::function<double(double)>& q, double t0, double t1,
                         const ErrorSpec& spec) {
  spec.validate();
  const auto grid = sample_grid(t0, t1, spec.d_tau_sample);
  if (grid.size() < 2) throw DomainError("trajectory shorter than two sampling points");
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) v[k] = q(grid[k]);
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double rate = (v[k + 1] - v[k]) / (grid[k + 1] - grid[k]);
    const double e = rate - spec.setpoint;
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(grid.size() - 1));
}

/// Error norm of an observable of the trajectory state, resampled from the dense output.
inline double error_norm(const dae::Trajectory& tr,
                         const std::function<double(std::span<const double>)>& observable,
                         const ErrorSpec& spec) {
  if (tr.size() < 2) throw DomainError("trajectory shorter than two samples");
  return error_norm([&](double t) { return observable(tr.at(t)); }, tr.front(), tr.back(), spec);
}

}  // namespace stefan_oc::metrics
