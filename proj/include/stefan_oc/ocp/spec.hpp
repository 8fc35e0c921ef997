#pragma once

#include <cmath>
#include <string>
#include <variant>

#include "stefan_oc/core/errors.hpp"
#include "stefan_oc/dae/system.hpp"
#include "stefan_oc/metrics/error_norm.hpp"
#include "stefan_oc/model/params.hpp"
#include "stefan_oc/model/stefan_model.hpp"

namespace stefan_oc::ocp {

struct MinTime {};
struct TrackTemperatureRate {
  double setpoint = 0.04;
};
struct TrackInterfaceVelocity {
  double setpoint = -0.1;
};
using Objective = std::variant<MinTime, TrackTemperatureRate, TrackInterfaceVelocity>;

struct StopOnMelt {};
struct FixedHorizon {
  double tau_f = 1.0;
};
using Horizon = std::variant<StopOnMelt, FixedHorizon>;

inline const char* objective_kind(const Objective& o) {
  if (std::holds_alternative<MinTime>(o)) return "min_time";
  if (std::holds_alternative<TrackTemperatureRate>(o)) return "track_temperature_rate";
  return "track_interface_velocity";
}

inline bool is_tracking(const Objective& o) { return !std::holds_alternative<MinTime>(o); }

inline double setpoint_of(const Objective& o) {
  if (auto r = std::get_if<TrackTemperatureRate>(&o)) return r->setpoint;
  if (auto v = std::get_if<TrackInterfaceVelocity>(&o)) return v->setpoint;
  return 0.0;
}

struct OcpSpec {
  Objective objective = MinTime{};
  dae::Bounds control_bounds{0.0, 1.0};
  Horizon horizon = StopOnMelt{};
  model::ModelParams model;
  double theta_b_guess = 0.5;
  model::AverageOptions average;
  /// Safety cap on the integration span when running to melt.
  double max_horizon = 100.0;

  void validate() const {
    model.validate();
    if (!(std::isfinite(control_bounds.lo) && std::isfinite(control_bounds.hi) &&
          control_bounds.lo < control_bounds.hi))
      throw ConfigError("control_bounds", "bounds must be finite and ordered");
    if (!std::isfinite(setpoint_of(objective))) throw ConfigError("setpoint", "must be finite");
    if (auto f = std::get_if<FixedHorizon>(&horizon))
      if (!(f->tau_f > 0.0 && std::isfinite(f->tau_f))) throw ConfigError("horizon", "tau_f must be > 0");
    if (!(max_horizon > 0.0)) throw ConfigError("max_horizon", "must be > 0");
    if (!std::isfinite(theta_b_guess)) throw ConfigError("theta_b_guess", "must be finite");
  }

  /// End of the integration span: tau_f, or the melt cap.
  double span_end() const {
    if (auto f = std::get_if<FixedHorizon>(&horizon)) return f->tau_f;
    return max_horizon;
  }

  bool stops_on_melt() const { return std::holds_alternative<StopOnMelt>(horizon); }

  /// Tracking error definition matching the objective (tracking objectives only).
  metrics::ErrorSpec error_spec(double d_tau_sample = 0.05) const {
    metrics::ErrorSpec e;
    e.setpoint = setpoint_of(objective);
    e.d_tau_sample = d_tau_sample;
    e.quantity = std::holds_alternative<TrackTemperatureRate>(objective)
                     ? metrics::Quantity::TemperatureRate
                     : metrics::Quantity::InterfaceVelocity;
    return e;
  }
};

}  // namespace stefan_oc::ocp
