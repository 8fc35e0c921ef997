#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "stefan_oc/dae/system.hpp"
#include "stefan_oc/model/stefan_model.hpp"
#include "stefan_oc/ocp/spec.hpp"

namespace stefan_oc::ocp {

enum class Regime { TrackingActive, BoundActive };
enum class BoundSide { Lower, Upper };

inline const char* to_string(Regime r) { return r == Regime::TrackingActive ? "tracking" : "bound"; }
inline const char* to_string(BoundSide b) { return b == BoundSide::Upper ? "upper" : "lower"; }

inline constexpr const char* kMeltEvent = "melt";
inline constexpr const char* kUpperEvent = "control_upper";
inline constexpr const char* kLowerEvent = "control_lower";
inline constexpr const char* kReenterEvent = "tracking_reenter";

/**
 * Layout shared by every system built on the model: [theta1 (n), theta2 (n),
 * s, theta_b]. The model rows read y' - f(y, theta_b); the last row is the
 * single algebraic equation that pins theta_b.
 */
class StateLayout {
 public:
  explicit StateLayout(std::shared_ptr<const model::StefanModel> m) : model_(std::move(m)) {}

  const model::StefanModel& model() const { return *model_; }
  std::shared_ptr<const model::StefanModel> model_ptr() const { return model_; }
  std::size_t n() const { return model_->n(); }
  std::size_t state_size() const { return model_->state_size(); }
  std::size_t dim() const { return state_size() + 1; }
  std::size_t s_index() const { return model_->s_index(); }
  std::size_t control_index() const { return state_size(); }

  std::vector<dae::VarKind> kinds() const {
    std::vector<dae::VarKind> k(dim(), dae::VarKind::Differential);
    k[control_index()] = dae::VarKind::Algebraic;
    return k;
  }

  /// Initial vector for a given heater temperature (initial melt layer included).
  std::vector<double> initial_vector(double theta_b) const {
    auto y = model_->initial_state(theta_b);
    y.push_back(theta_b);
    return y;
  }

  /// Model rows y' - f; returns f in `f` for use by the appended row.
  void model_rows(std::span<const double> y, std::span<const double> yp, std::span<double> r,
                  std::span<double> f) const {
    const std::size_t m = state_size();
    model_->evaluate(y.first(m), y[m], f);
    for (std::size_t i = 0; i < m; ++i) r[i] = yp[i] - f[i];
  }

  dae::StopEvent melt_event() const {
    const std::size_t si = s_index();
    const double eps = model_->params().eps_front;
    return {kMeltEvent, [si, eps](double, std::span<const double> y) { return y[si] - eps; },
            dae::Crossing::Falling};
  }

 private:
  std::shared_ptr<const model::StefanModel> model_;
};

struct ReformulatedDae {
  dae::DaeSystem system;
  Regime active_regime = Regime::TrackingActive;
  std::optional<BoundSide> bound;
  int declared_index = 1;
  OcpSpec spec;
  std::shared_ptr<const StateLayout> layout;

  /// Tracking equation residual at state y with the control replaced by theta_b.
  double tracking_residual(std::span<const double> y, double theta_b) const {
    const auto& m = layout->model();
    std::vector<double> f(m.state_size());
    m.evaluate(y.first(m.state_size()), theta_b, f);
    return tracking_row(spec, m, y, f, theta_b);
  }

  /// Sign of d(tracking residual)/d(theta_b): heating raises the liquid rate
  /// and makes the front faster (more negative velocity).
  int tracking_sign() const {
    return std::holds_alternative<TrackInterfaceVelocity>(spec.objective) ? -1 : 1;
  }

  static double tracking_row(const OcpSpec& spec, const model::StefanModel& m, std::span<const double> y,
                             std::span<const double> f, double theta_b) {
    return std::visit(
        [&](const auto& o) -> double {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, MinTime>) {
            return theta_b - spec.control_bounds.hi;
          } else if constexpr (std::is_same_v<T, TrackTemperatureRate>) {
            return m.average_rate(y.first(m.state_size()), f, spec.average) - o.setpoint;
          } else {
            return f[m.s_index()] - o.setpoint;
          }
        },
        spec.objective);
  }
};

/// Declared differential index of the tracking system.
inline int tracking_index(const OcpSpec& spec) {
  if (std::holds_alternative<MinTime>(spec.objective)) return 1;
  if (std::holds_alternative<TrackTemperatureRate>(spec.objective)) return spec.average.include_wall ? 1 : 2;
  return static_cast<int>(spec.model.n);
}

/**
 * Replace the objective by an algebraic equation and promote theta_b to an
 * algebraic state. In the bound regime the appended row holds theta_b at the
 * bound and an event watches for the tracking root to come back inside.
 */
inline ReformulatedDae reformulate(const OcpSpec& spec, Regime regime = Regime::TrackingActive,
                                   std::optional<BoundSide> side = std::nullopt,
                                   double switch_margin = 1e-6,
                                   std::shared_ptr<const StateLayout> layout = nullptr) {
  spec.validate();
  if (!layout) layout = std::make_shared<StateLayout>(std::make_shared<model::StefanModel>(spec.model));
  if (regime == Regime::BoundActive && !side) throw ConfigError("regime", "bound regime needs a side");

  ReformulatedDae out;
  out.spec = spec;
  out.layout = layout;
  out.active_regime = regime;
  out.bound = regime == Regime::BoundActive ? side : std::nullopt;
  out.declared_index = regime == Regime::BoundActive ? 1 : tracking_index(spec);

  auto& sys = out.system;
  sys.dim = layout->dim();
  sys.kinds = layout->kinds();
  sys.semi_explicit = true;
  sys.index_hint = out.declared_index;
  sys.bounds.assign(sys.dim, std::nullopt);
  sys.bounds[layout->control_index()] = spec.control_bounds;
  sys.stop_events.push_back(layout->melt_event());

  const std::size_t ci = layout->control_index();
  const std::size_t m = layout->state_size();
  const double lo = spec.control_bounds.lo, hi = spec.control_bounds.hi;

  if (regime == Regime::BoundActive) {
    const double b = *side == BoundSide::Upper ? hi : lo;
    sys.residual = [layout, b, m](double, std::span<const double> y, std::span<const double> yp,
                                  std::span<double> r) {
      thread_local std::vector<double> f;
      f.resize(m);
      layout->model_rows(y, yp, r, f);
      r[m] = y[m] - b;
    };
    if (is_tracking(spec.objective)) {
      const double dir = *side == BoundSide::Upper ? 1.0 : -1.0;
      const double sigma = out.tracking_sign();
      const double probe = b - dir * switch_margin;
      const bool control_free = std::holds_alternative<TrackInterfaceVelocity>(spec.objective) ||
                                !spec.average.include_wall;
      // re-entry: the tracking root lies strictly inside the bounds
      sys.stop_events.push_back(
          {kReenterEvent,
           [spec, layout, sigma, dir, probe, control_free, switch_margin](double, std::span<const double> y) {
             const auto& mod = layout->model();
             thread_local std::vector<double> f;
             f.resize(mod.state_size());
             mod.evaluate(y.first(mod.state_size()), probe, f);
             const double res = ReformulatedDae::tracking_row(spec, mod, y, f, probe);
             return sigma * dir * res - (control_free ? switch_margin : 0.0);
           },
           dae::Crossing::Rising});
    }
    return out;
  }

  sys.residual = [layout, spec, m](double, std::span<const double> y, std::span<const double> yp,
                                   std::span<double> r) {
    thread_local std::vector<double> f;
    f.resize(m);
    layout->model_rows(y, yp, r, f);
    r[m] = ReformulatedDae::tracking_row(spec, layout->model(), y, f, y[m]);
  };
  if (is_tracking(spec.objective)) {
    sys.stop_events.push_back({kUpperEvent, [ci, hi](double, std::span<const double> y) { return y[ci] - hi; },
                               dae::Crossing::Rising});
    sys.stop_events.push_back({kLowerEvent, [ci, lo](double, std::span<const double> y) { return y[ci] - lo; },
                               dae::Crossing::Falling});
  }
  return out;
}

/**
 * Forward model under a prescribed heater trajectory u(tau): the appended row
 * is theta_b - u(tau). Breakpoints mark where u is not smooth.
 */
inline dae::DaeSystem plant_system(std::shared_ptr<const StateLayout> layout,
                                   std::function<double(double)> control,
                                   std::vector<double> breakpoints = {}) {
  dae::DaeSystem sys;
  sys.dim = layout->dim();
  sys.kinds = layout->kinds();
  sys.semi_explicit = true;
  sys.index_hint = 1;
  sys.breakpoints = std::move(breakpoints);
  sys.stop_events.push_back(layout->melt_event());
  const std::size_t m = layout->state_size();
  sys.residual = [layout, control = std::move(control), m](double tau, std::span<const double> y,
                                                           std::span<const double> yp, std::span<double> r) {
    thread_local std::vector<double> f;
    f.resize(m);
    layout->model_rows(y, yp, r, f);
    r[m] = y[m] - control(tau);
  };
  return sys;
}

}  // namespace stefan_oc::ocp
