#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stefan_oc/core/errors.hpp"
#include "stefan_oc/dae/bdf.hpp"
#include "stefan_oc/dae/collocation.hpp"
#include "stefan_oc/dae/consistent_init.hpp"
#include "stefan_oc/ocp/reformulate.hpp"
#include "stefan_oc/ocp/report.hpp"
#include "stefan_oc/ocp/spec.hpp"

namespace stefan_oc::ocp {

enum class Backend { Auto, Bdf, Collocation };

struct SimOptions {
  dae::CollocationConfig colloc;
  Backend backend = Backend::Auto;  ///< Auto: BDF for index 1, collocation otherwise
  double bdf_tol = 1e-8;
  int max_switches = 50;
  double switch_margin = 1e-6;
  double d_tau_sample = 0.05;
};

/**
 * Regime change implied by the event that ended the last simulated piece,
 * or nothing when it ended at the horizon or at melt.
 */
inline std::optional<std::pair<SwitchEvent, ReformulatedDae>> detect_and_switch(
    const ReformulatedDae& current, const dae::Trajectory& tail, double switch_margin = 1e-6) {
  if (tail.events.empty()) return std::nullopt;
  const auto& ev = tail.events.back();
  SwitchEvent sw;
  sw.tau = ev.tau;
  sw.from_regime = current.active_regime;
  if (current.active_regime == Regime::TrackingActive && (ev.id == kUpperEvent || ev.id == kLowerEvent)) {
    sw.to_regime = Regime::BoundActive;
    sw.bound = ev.id == kUpperEvent ? BoundSide::Upper : BoundSide::Lower;
    return std::make_pair(sw, reformulate(current.spec, Regime::BoundActive, sw.bound, switch_margin,
                                          current.layout));
  }
  if (current.active_regime == Regime::BoundActive && ev.id == kReenterEvent) {
    sw.to_regime = Regime::TrackingActive;
    sw.bound = current.bound;
    return std::make_pair(sw, reformulate(current.spec, Regime::TrackingActive, std::nullopt, switch_margin,
                                          current.layout));
  }
  return std::nullopt;
}

namespace detail {

inline dae::Trajectory run_piece(const ReformulatedDae& r, std::vector<double> y0, double t0, double t1,
                                 const SimOptions& opt) {
  const bool bdf = opt.backend == Backend::Bdf || (opt.backend == Backend::Auto && r.declared_index == 1);
  if (bdf) {
    auto sys = r.system;
    sys.index_hint = 1;  // the bound regime and index-1 tracking only
    if (r.declared_index != 1) throw ConfigError("backend", "BDF backend needs an index-1 regime");
    auto o = dae::BdfOptions::with_tol(opt.bdf_tol);
    o.newton_tol = opt.colloc.newton_tol;
    return dae::integrate_index1(sys, std::move(y0), {t0, t1}, o);
  }
  return dae::collocate(r.system, std::move(y0), {t0, t1}, opt.colloc);
}

}  // namespace detail

/**
 * Simulation-based optimal control: one (hybrid) DAE simulation of the
 * reformulated problem yields the heater trajectory. No optimizer is used.
 */
inline SolveReport solve_simulation_based(const OcpSpec& spec, const SimOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  spec.validate();
  opt.colloc.validate();

  SolveReport rep;
  rep.method = "sim";
  rep.spec = spec;

  auto layout = std::make_shared<StateLayout>(std::make_shared<model::StefanModel>(spec.model));
  auto reform = reformulate(spec, Regime::TrackingActive, std::nullopt, opt.switch_margin, layout);
  const std::size_t ci = layout->control_index();

  // consistent start. When the appended row does not see theta_b directly
  // the initial melt layer is tied to the heater temperature, which makes
  // the row solvable for it; otherwise the layer stays at the guess.
  dae::InitOptions io;
  if (reform.declared_index > 1) {
    io.coupling = [&layout, ci](std::span<double> y) {
      const auto x = layout->model().initial_state(y[ci]);
      std::copy(x.begin(), x.end(), y.begin());
    };
  }
  auto init = dae::consistent_init(reform.system, 0.0, layout->initial_vector(spec.theta_b_guess), io);
  std::vector<double> y = init.y;
  if (!init.feasible) {
    SwitchEvent sw;
    sw.tau = 0.0;
    sw.from_regime = Regime::TrackingActive;
    sw.to_regime = Regime::BoundActive;
    sw.bound = init.clipped_at >= spec.control_bounds.hi ? BoundSide::Upper : BoundSide::Lower;
    sw.at_start = true;
    rep.switches.push_back(sw);
    rep.initial_clipped = true;
    reform = reformulate(spec, Regime::BoundActive, sw.bound, opt.switch_margin, layout);
  }

  double t = 0.0;
  const double t_end = spec.span_end();
  dae::Trajectory full;
  while (true) {
    rep.declared_indices.push_back(reform.declared_index);
    dae::Trajectory piece;
    try {
      piece = detail::run_piece(reform, y, t, t_end, opt);
    } catch (const CollocationFailure& e) {
      throw CollocationFailure(std::string(e.what()) + " (regime " + to_string(reform.active_regime) + ")",
                               e.residual_norm(), e.element(), e.tau());
    } catch (const IntegrationFailure& e) {
      throw IntegrationFailure(std::string(e.what()) + " (regime " + to_string(reform.active_regime) + ")",
                               e.tau(), e.last_state());
    }
    full.append(piece);
    auto next = detect_and_switch(reform, piece, opt.switch_margin);
    if (!next) break;
    if (static_cast<int>(rep.switches.size()) >= opt.max_switches)
      throw SwitchingError("more than " + std::to_string(opt.max_switches) + " regime switches (chattering)");
    rep.switches.push_back(next->first);
    reform = std::move(next->second);
    t = piece.back();
    y = piece.values.back();
    if (reform.active_regime == Regime::BoundActive) {
      y[ci] = *next->first.bound == BoundSide::Upper ? spec.control_bounds.hi : spec.control_bounds.lo;
    } else if (reform.declared_index == 1) {
      auto ri = dae::consistent_init(reform.system, t, y);
      y = ri.y;
      y[ci] = std::clamp(y[ci], spec.control_bounds.lo, spec.control_bounds.hi);
    }
  }

  rep.trajectory = std::move(full);
  rep.observables = compute_observables(*layout, rep.trajectory, spec.average);
  rep.thaw_time = thawing_time(rep.trajectory);
  if (is_tracking(spec.objective)) rep.error_norm = tracking_error(spec, *layout, rep.trajectory, opt.d_tau_sample);
  rep.iterations = rep.trajectory.stats.newton_iterations;
  rep.simulations = rep.declared_indices.size();
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace stefan_oc::ocp
