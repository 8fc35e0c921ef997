#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stefan_oc/core/errors.hpp"

namespace stefan_oc::dae {

enum class VarKind { Differential, Algebraic };

/// Sign change direction that triggers a stop event.
enum class Crossing { Rising, Falling, Either };

struct Bounds {
  double lo = -INFINITY;
  double hi = INFINITY;
};

using ResidualFn = std::function<void(double tau, std::span<const double> y,
                                      std::span<const double> yp, std::span<double> res)>;
using EventFn = std::function<double(double tau, std::span<const double> y)>;

/// Integration stops at the first crossing of any stop event.
struct StopEvent {
  std::string id;
  EventFn fn;
  Crossing direction = Crossing::Either;
};

/**
 * Residual-form system F(tau, y, y') = 0.
 *
 * When `semi_explicit` is set, row i belongs to variable i: differential rows
 * read y'_i - f_i(tau, y) and algebraic rows do not involve y'. Solvers then
 * use dF/dy' = diag(differential) instead of differencing it, and consistent
 * initialization knows which rows are algebraic.
 */
struct DaeSystem {
  std::size_t dim = 0;
  ResidualFn residual;
  std::vector<VarKind> kinds;
  std::vector<std::optional<Bounds>> bounds;
  int index_hint = 1;
  std::vector<StopEvent> stop_events;
  /// Times where the residual is non-smooth in tau (control breakpoints).
  std::vector<double> breakpoints;
  bool semi_explicit = false;

  bool is_algebraic(std::size_t i) const { return kinds[i] == VarKind::Algebraic; }

  std::size_t algebraic_count() const {
    std::size_t c = 0;
    for (auto k : kinds) c += (k == VarKind::Algebraic);
    return c;
  }

  void validate() const {
    if (dim == 0) throw ConfigError("dim", "system has no variables");
    if (!residual) throw ConfigError("residual", "missing residual function");
    if (kinds.size() != dim) throw ConfigError("kinds", "need one classification per variable");
    if (!bounds.empty() && bounds.size() != dim)
      throw ConfigError("bounds", "bounds must be empty or one entry per variable");
    for (const auto& e : stop_events)
      if (!e.fn) throw ConfigError("stop_events", "event '" + e.id + "' has no function");
  }

  std::vector<double> eval(double tau, std::span<const double> y, std::span<const double> yp) const {
    std::vector<double> r(dim);
    residual(tau, y, yp, r);
    return r;
  }
};

inline double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace stefan_oc::dae
