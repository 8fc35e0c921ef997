#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "stefan_oc/core/errors.hpp"

namespace stefan_oc::shooting {

enum class ControlKind { PiecewiseConstant, PiecewiseLinear };

inline const char* to_string(ControlKind k) {
  return k == ControlKind::PiecewiseConstant ? "constant" : "linear";
}

inline ControlKind parse_control_kind(const std::string& s) {
  if (s == "constant") return ControlKind::PiecewiseConstant;
  if (s == "linear") return ControlKind::PiecewiseLinear;
  throw ConfigError("kind", "expected 'constant' or 'linear', got '" + s + "'");
}

/// Number of node values for n_c intervals.
inline std::size_t node_count(ControlKind k, std::size_t n_c) {
  return k == ControlKind::PiecewiseConstant ? n_c : n_c + 1;
}

/**
 * Heater trajectory on [t0, t1] split into n_c uniform intervals. Constant
 * controls hold one value per interval (interval k covers (b_k, b_k+1], the
 * first one also b_0); linear controls interpolate between breakpoint values.
 */
struct ControlParam {
  ControlKind kind = ControlKind::PiecewiseLinear;
  std::size_t n_c = 1;
  std::vector<double> nodes;
  double t0 = 0.0;
  double t1 = 1.0;
  double lo = 0.0;
  double hi = 1.0;

  static ControlParam uniform(ControlKind kind, std::size_t n_c, double value, double t0, double t1) {
    ControlParam cp;
    cp.kind = kind;
    cp.n_c = n_c;
    cp.t0 = t0;
    cp.t1 = t1;
    cp.nodes.assign(node_count(kind, n_c), value);
    return cp;
  }

  void validate() const {
    if (n_c < 1) throw ConfigError("nc", "need at least one control interval");
    if (!(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1))
      throw ConfigError("horizon", "control horizon must be a finite, nonempty interval");
    if (nodes.size() != node_count(kind, n_c))
      throw ConfigError("nodes", "expected " + std::to_string(node_count(kind, n_c)) + " values for " +
                                     to_string(kind) + " control with nc = " + std::to_string(n_c));
    for (double v : nodes)
      if (!(v >= lo && v <= hi)) throw ConfigError("nodes", "node value outside the control bounds");
  }

  double width() const { return (t1 - t0) / static_cast<double>(n_c); }

  std::vector<double> breakpoints() const {
    std::vector<double> b(n_c + 1);
    for (std::size_t k = 0; k <= n_c; ++k) b[k] = t0 + static_cast<double>(k) * width();
    b.back() = t1;
    return b;
  }
};

/// Control value at tau. Throws DomainError outside [t0, t1].
inline double eval_control(const ControlParam& cp, double tau) {
  const double slack = 1e-12 * std::max(1.0, std::abs(cp.t1));
  if (!(tau >= cp.t0 - slack && tau <= cp.t1 + slack))
    throw DomainError("control evaluated outside its horizon");
  tau = std::clamp(tau, cp.t0, cp.t1);
  double x = (tau - cp.t0) / cp.width();
  // snap to a breakpoint within roundoff so the side convention holds there
  const double xr = std::round(x);
  if (std::abs(x - xr) <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, xr)) x = xr;
  const auto last = static_cast<double>(cp.n_c - 1);
  if (cp.kind == ControlKind::PiecewiseConstant) {
    // left-continuous: a breakpoint belongs to the interval that ends there
    const double k = std::clamp(std::ceil(x) - 1.0, 0.0, last);
    return cp.nodes[static_cast<std::size_t>(k)];
  }
  const double k = std::clamp(std::floor(x), 0.0, last);
  const auto i = static_cast<std::size_t>(k);
  const double w = x - k;
  if (w == 0.0) return cp.nodes[i];
  if (w == 1.0) return cp.nodes[i + 1];
  return (1.0 - w) * cp.nodes[i] + w * cp.nodes[i + 1];
}

/// Control extended past t1 by its final value (the plant may outlive the horizon).
inline double eval_control_held(const ControlParam& cp, double tau) {
  return eval_control(cp, std::min(tau, cp.t1));
}

}  // namespace stefan_oc::shooting
