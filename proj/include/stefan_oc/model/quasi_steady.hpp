#pragma once

#include <algorithm>
#include <cmath>

#include "stefan_oc/core/errors.hpp"
#include "stefan_oc/model/params.hpp"

namespace stefan_oc::model {

/**
 * Closed-form interface velocity when conduction in the liquid annulus is
 * quasi-steady (logarithmic profile) and the solid sits at the melting point:
 *
 *   ds/dtau = -Ste k2/k1 Bi theta_b / (s (Bi ln(1/s) + wall_ratio))
 *
 * Monotone (decreasing) in theta_b.
 */
inline double quasi_steady_velocity(double s, double theta_b, const ModelParams& p) {
  if (!(s > 0.0)) throw DomainError("quasi-steady velocity needs s > 0");
  if (!(theta_b >= 0.0)) throw DomainError("quasi-steady velocity needs theta_b >= 0");
  const double denom = s * (p.biot * std::log(1.0 / s) + p.wall_ratio);
  return -p.stefan_number * p.k_ratio * p.biot * theta_b / denom;
}

/// Most negative interface velocity reachable at `s` with the heater at its ceiling.
inline double feasible_velocity_bound(double s, const ModelParams& p) {
  return quasi_steady_velocity(s, p.theta_max, p);
}

/**
 * Global feasibility threshold over s in [eps_front, 1 - eps_front]: the
 * slowest attainable velocity at the ceiling, i.e. the largest (least
 * negative) value of feasible_velocity_bound. Setpoints above it never drive
 * the heater to its ceiling in the quasi-steady picture.
 *
 * s (Bi ln(1/s) + w) peaks at s* = exp(w/Bi - 1), which gives the threshold
 * directly; the endpoints cover s* outside the admissible range.
 */
inline double global_feasibility_threshold(const ModelParams& p) {
  const double lo = p.eps_front;
  const double hi = 1.0 - p.eps_front;
  const double s_star = std::clamp(std::exp(p.wall_ratio / p.biot - 1.0), lo, hi);
  return std::max({feasible_velocity_bound(lo, p), feasible_velocity_bound(hi, p),
                   feasible_velocity_bound(s_star, p)});
}

/**
 * Quasi-steady estimate of the full-melt time at the heater ceiling,
 * integral of ds / |v(s)| from eps_front to 1 - eps_front (composite Simpson).
 * Sensible heat only slows melting, so this is a lower bound in practice.
 */
inline double quasi_steady_melt_time(const ModelParams& p, int panels = 2000) {
  const double a = p.eps_front;
  const double b = 1.0 - p.eps_front;
  const double h = (b - a) / panels;
  auto f = [&](double s) { return 1.0 / std::abs(feasible_velocity_bound(s, p)); };
  double acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

}  // namespace stefan_oc::model
