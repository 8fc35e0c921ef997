#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "stefan_oc/core/errors.hpp"

namespace stefan_oc::model {

/**
 * Dimensionless groups and grid resolution of one cylindrical two-phase
 * Stefan model. Temperatures are scaled so that 0 is the melting point and
 * 1 the heater ceiling; lengths by the vial radius; time by R^2 / alpha_solid.
 */
struct ModelParams {
  std::size_t n = 20;           ///< grid points per phase
  double stefan_number = 0.26;  ///< c1 (T0 - Tm) / latent heat
  double alpha_ratio = 2.0;     ///< liquid / solid thermal diffusivity
  double k_ratio = 0.5;         ///< liquid / solid conductivity
  double biot = 2.0;            ///< outer film number U R / k2
  double wall_ratio = 2.0;      ///< wall conductance term
  double eps_front = 1e-3;      ///< interface regularization thickness
  double theta_max = 1.0;       ///< heater ceiling

  /// Effective Robin coefficient of the heated wall, dtheta/dr = H (theta_b - theta_wall).
  double wall_coefficient() const { return biot / wall_ratio; }

  /// Throws ConfigError naming the first offending field.
  void validate() const {
    if (n < 3) throw ConfigError("n", "need at least 3 grid points per phase");
    auto positive = [](const char* field, double v) {
      if (!(std::isfinite(v) && v > 0.0)) throw ConfigError(field, "must be finite and > 0");
    };
    positive("stefan_number", stefan_number);
    positive("alpha_ratio", alpha_ratio);
    positive("k_ratio", k_ratio);
    positive("biot", biot);
    positive("wall_ratio", wall_ratio);
    positive("theta_max", theta_max);
    if (!(eps_front > 0.0 && eps_front < 0.05))
      throw ConfigError("eps_front", "must lie in (0, 0.05)");
  }
};

/// The shipped default parameter set.
inline ModelParams shipped_defaults() { return ModelParams{}; }

}  // namespace stefan_oc::model
