#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stefan_oc/dae/trajectory.hpp"
#include "stefan_oc/ocp/reformulate.hpp"
#include "stefan_oc/ocp/spec.hpp"

namespace stefan_oc::ocp {

struct SwitchEvent {
  double tau = 0.0;
  Regime from_regime = Regime::TrackingActive;
  Regime to_regime = Regime::BoundActive;
  std::optional<BoundSide> bound;  ///< the bound involved (entered or left)
  bool at_start = false;           ///< initial point was infeasible and got clipped
};

/// Per-sample observables derived from the state trajectory.
struct Observables {
  std::vector<double> tau;
  std::vector<double> s;
  std::vector<double> ds_dtau;
  std::vector<double> theta_avg;
  std::vector<double> dtheta_avg_dtau;
  std::vector<double> theta_b;
};

struct SolveReport {
  std::string method;  ///< "sim" or "shooting"
  OcpSpec spec;
  dae::Trajectory trajectory;
  Observables observables;
  std::vector<SwitchEvent> switches;
  std::vector<int> declared_indices;  ///< declared index of each simulated regime, in order
  bool initial_clipped = false;
  std::optional<double> thaw_time;
  std::optional<double> error_norm;
  double wall_time = 0.0;
  bool converged = true;
  std::size_t iterations = 0;
  std::size_t simulations = 0;
  std::string message;

  // shooting only
  std::string control_kind;
  std::vector<double> control_nodes;
  std::vector<double> control_breakpoints;
  std::optional<double> objective_value;
};

/// Time at which the front reached eps_front (stop event), if it did.
inline std::optional<double> thawing_time(const dae::Trajectory& tr) {
  for (const auto& e : tr.events)
    if (e.id == kMeltEvent) return e.tau;
  return std::nullopt;
}

inline Observables compute_observables(const StateLayout& layout, const dae::Trajectory& tr,
                                       const model::AverageOptions& avg) {
  const auto& m = layout.model();
  Observables o;
  const std::size_t ms = m.state_size();
  std::vector<double> f(ms);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto& y = tr.values[i];
    const std::span<const double> x(y.data(), ms);
    const double tb = y[layout.control_index()];
    m.evaluate(x, tb, f);
    o.tau.push_back(tr.taus[i]);
    o.s.push_back(y[layout.s_index()]);
    o.ds_dtau.push_back(f[m.s_index()]);
    o.theta_avg.push_back(m.average_temperature(x, avg));
    o.dtheta_avg_dtau.push_back(m.average_rate(x, f, avg));
    o.theta_b.push_back(tb);
  }
  return o;
}

/// Tracking error of a trajectory for the objective of `spec`, resampled on the dense output.
inline double tracking_error(const OcpSpec& spec, const StateLayout& layout, const dae::Trajectory& tr,
                             double d_tau_sample = 0.05) {
  const auto es = spec.error_spec(d_tau_sample);
  const auto& m = layout.model();
  const auto avg = spec.average;
  if (es.quantity == metrics::Quantity::TemperatureRate) {
    return metrics::error_norm(
        tr, [&](std::span<const double> y) { return m.average_temperature(y.first(m.state_size()), avg); }, es);
  }
  const std::size_t si = layout.s_index();
  return metrics::error_norm(tr, [si](std::span<const double> y) { return y[si]; }, es);
}

}  // namespace stefan_oc::ocp
