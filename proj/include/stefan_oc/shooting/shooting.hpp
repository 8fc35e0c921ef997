#pragma once

#include <chrono>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stefan_oc/core/errors.hpp"
#include "stefan_oc/dae/bdf.hpp"
#include "stefan_oc/metrics/error_norm.hpp"
#include "stefan_oc/model/quasi_steady.hpp"
#include "stefan_oc/ocp/reformulate.hpp"
#include "stefan_oc/ocp/report.hpp"
#include "stefan_oc/ocp/spec.hpp"
#include "stefan_oc/shooting/control.hpp"
#include "stefan_oc/shooting/optimizer.hpp"

namespace stefan_oc::shooting {

struct NlpConfig {
  double opt_tol = 1e-7;
  double integ_tol = 1e-10;
  double quad_dtau = 0.05;
  double fd_step = 1e-6;
  int max_iter = 200;
  /// End of the control horizon; empty selects a default per objective.
  std::optional<double> horizon;
  /// Objective value returned when the plant simulation fails.
  double penalty = 1e6;

  void validate() const {
    auto positive = [](const char* field, double v) {
      if (!(v > 0.0 && std::isfinite(v))) throw ConfigError(field, "must be finite and > 0");
    };
    positive("opt_tol", opt_tol);
    positive("integ_tol", integ_tol);
    positive("quad_dtau", quad_dtau);
    positive("fd_step", fd_step);
    positive("penalty", penalty);
    if (max_iter < 1) throw ConfigError("max_iter", "must be >= 1");
    if (horizon) positive("horizon", *horizon);
  }
};

/**
 * Control horizon: the configured value, else a fixed tau_f of the spec,
 * else the quasi-steady melt time at the heater ceiling (min time) or the
 * time to cross the domain at the target speed (velocity tracking). Rate
 * tracking has no natural horizon and needs one of the first two.
 */
inline double control_horizon(const ocp::OcpSpec& spec, const NlpConfig& nlp) {
  if (nlp.horizon) return *nlp.horizon;
  if (auto f = std::get_if<ocp::FixedHorizon>(&spec.horizon)) return f->tau_f;
  if (std::holds_alternative<ocp::MinTime>(spec.objective)) return model::quasi_steady_melt_time(spec.model);
  if (auto v = std::get_if<ocp::TrackInterfaceVelocity>(&spec.objective)) {
    if (v->setpoint >= 0.0) throw ConfigError("horizon", "velocity setpoint >= 0 needs an explicit horizon");
    const double travel = 1.0 - 2.0 * spec.model.eps_front;
    return travel / std::abs(v->setpoint);
  }
  throw ConfigError("horizon", "rate tracking under shooting needs an explicit control horizon");
}

/// One plant run under a parameterized control.
struct PlantRun {
  dae::Trajectory trajectory;
  std::vector<dae::BdfCheckpoint> checkpoints;  ///< integrator state at each breakpoint reached
  bool failed = false;
  std::string message;
};

/// Last breakpoint index up to which the control is unchanged when node i moves.
inline std::size_t unaffected_breakpoint(ControlKind kind, std::size_t i) {
  if (kind == ControlKind::PiecewiseConstant) return i;
  return i == 0 ? 0 : i - 1;
}

/// Simulate the model under the control (held at its last value past the
/// horizon). Tracking runs end at the control horizon or at melt. With a
/// base run whose control agrees with cp up to breakpoint b_j, the run
/// resumes from the base checkpoint at b_j; the result equals a full run.
inline PlantRun simulate_control(const ocp::OcpSpec& spec, const ControlParam& cp, const NlpConfig& nlp,
                                 std::shared_ptr<const ocp::StateLayout> layout = nullptr,
                                 const PlantRun* base = nullptr, std::size_t agree_until = 0) {
  if (!layout) layout = std::make_shared<ocp::StateLayout>(std::make_shared<model::StefanModel>(spec.model));
  PlantRun run;
  const double t_end = ocp::is_tracking(spec.objective) ? std::min(cp.t1, spec.span_end()) : spec.span_end();
  auto bps = cp.breakpoints();
  std::vector<double> inner(bps.begin() + 1, bps.end());
  auto sys = ocp::plant_system(layout, [cp](double tau) { return eval_control_held(cp, tau); }, inner);
  auto o = dae::BdfOptions::with_tol(nlp.integ_tol);
  // the residual of the thin initial layer carries roundoff near 1e-9, so the
  // Newton residual test stays at its default while the error test uses integ_tol
  o.newton_tol = std::max(1e-8, nlp.integ_tol);
  const dae::BdfCheckpoint* from = nullptr;
  if (base && !base->failed && agree_until > 0 && agree_until < bps.size())
    for (const auto& c : base->checkpoints)
      if (c.t == bps[agree_until]) from = &c;
  try {
    if (from)
      run.trajectory = dae::resume_index1(sys, base->trajectory, *from, {cp.t0, t_end}, o);
    else
      run.trajectory = dae::integrate_index1(sys, layout->initial_vector(eval_control(cp, cp.t0)),
                                             {cp.t0, t_end}, o, run.checkpoints);
  } catch (const Error& e) {
    run.failed = true;
    run.message = e.what();
  }
  return run;
}

/// Riemann sum of the squared deviation of the forward-difference rate from
/// the setpoint, on the grid of step quad_dtau over the run.
inline double tracking_integral(const ocp::OcpSpec& spec, const ocp::StateLayout& layout,
                                const dae::Trajectory& tr, double quad_dtau) {
  const auto grid = metrics::sample_grid(tr.front(), tr.back(), quad_dtau);
  if (grid.size() < 2) throw DomainError("run shorter than two quadrature points");
  const auto& m = layout.model();
  const bool rate = std::holds_alternative<ocp::TrackTemperatureRate>(spec.objective);
  const double sp = ocp::setpoint_of(spec.objective);
  auto quantity = [&](double t) {
    const auto y = tr.at(t);
    return rate ? m.average_temperature(std::span<const double>(y).first(m.state_size()), spec.average)
                : y[layout.s_index()];
  };
  double prev = quantity(grid[0]), acc = 0.0;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const double next = quantity(grid[k + 1]);
    const double dt = grid[k + 1] - grid[k];
    const double e = (next - prev) / dt - sp;
    acc += e * e * dt;
    prev = next;
  }
  return acc;
}

struct ObjectiveValue {
  double value = INFINITY;
  bool failed = false;  ///< plant run failed; value is the penalty
  std::string message;
};

/**
 * Min time: the thawing time (a run that never melts scores the span end
 * plus the remaining front distance). Tracking: the Riemann sum above.
 */
inline ObjectiveValue objective_of_run(const ocp::OcpSpec& spec, const PlantRun& run, const NlpConfig& nlp,
                                       const ocp::StateLayout& layout) {
  ObjectiveValue ov;
  if (run.failed || run.trajectory.size() < 2) {
    ov.value = nlp.penalty;
    ov.failed = true;
    ov.message = run.failed ? run.message : "plant run produced fewer than two samples";
    return ov;
  }
  if (!ocp::is_tracking(spec.objective)) {
    if (auto t = ocp::thawing_time(run.trajectory)) {
      ov.value = *t;
    } else {
      const double s_end = run.trajectory.values.back()[layout.s_index()];
      ov.value = run.trajectory.back() + 100.0 * (s_end - spec.model.eps_front);
    }
    return ov;
  }
  try {
    ov.value = tracking_integral(spec, layout, run.trajectory, nlp.quad_dtau);
  } catch (const DomainError& e) {
    ov.value = nlp.penalty;
    ov.failed = true;
    ov.message = e.what();
  }
  return ov;
}

inline ObjectiveValue objective(const ocp::OcpSpec& spec, const ControlParam& cp, const NlpConfig& nlp,
                                std::shared_ptr<const ocp::StateLayout> layout = nullptr) {
  if (!layout) layout = std::make_shared<ocp::StateLayout>(std::make_shared<model::StefanModel>(spec.model));
  return objective_of_run(spec, simulate_control(spec, cp, nlp, layout), nlp, *layout);
}

/**
 * Direct single shooting: box-constrained quasi-Newton descent on the node
 * values with forward-difference gradients, starting from theta_b_guess.
 */
inline ocp::SolveReport solve_shooting(const ocp::OcpSpec& spec, ControlKind kind, std::size_t n_c,
                                       const NlpConfig& nlp = {}) {
  const auto start = std::chrono::steady_clock::now();
  spec.validate();
  nlp.validate();
  const double t1 = control_horizon(spec, nlp);
  auto layout = std::make_shared<ocp::StateLayout>(std::make_shared<model::StefanModel>(spec.model));

  auto cp = ControlParam::uniform(kind, n_c, spec.theta_b_guess, 0.0, t1);
  cp.lo = spec.control_bounds.lo;
  cp.hi = spec.control_bounds.hi;
  for (double& v : cp.nodes) v = std::clamp(v, cp.lo, cp.hi);
  cp.validate();

  std::size_t sims = 0;
  std::size_t failures = 0;
  // the last full run, reused as the prefix of the gradient runs at the same point
  std::vector<double> base_x;
  PlantRun base;
  auto score = [&](const PlantRun& run) {
    ++sims;
    auto ov = objective_of_run(spec, run, nlp, *layout);
    if (ov.failed) ++failures;
    return ov.value;
  };
  auto f = [&](const std::vector<double>& x) {
    ControlParam c = cp;
    c.nodes = x;
    base = simulate_control(spec, c, nlp, layout);
    base_x = x;
    return score(base);
  };
  auto grad = [&](const std::vector<double>& x, double fx) {
    if (x != base_x) fx = f(x);
    std::vector<double> g(x.size());
    ControlParam c = cp;
    c.nodes = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
      // forward step, reversed at the upper bound
      const double h = x[i] + nlp.fd_step <= cp.hi ? nlp.fd_step : -nlp.fd_step;
      c.nodes[i] = x[i] + h;
      g[i] = (score(simulate_control(spec, c, nlp, layout, &base, unaffected_breakpoint(kind, i))) - fx) / h;
      c.nodes[i] = x[i];
    }
    return g;
  };
  BoxOptions bo;
  bo.opt_tol = nlp.opt_tol;
  bo.max_iter = nlp.max_iter;
  bo.memory = std::max<int>(bo.memory, static_cast<int>(node_count(kind, n_c)));
  const std::vector<double> lo(cp.nodes.size(), cp.lo), hi(cp.nodes.size(), cp.hi);
  auto res = projected_lbfgs(f, grad, cp.nodes, lo, hi, bo);
  cp.nodes = res.x;

  ocp::SolveReport rep;
  rep.method = "shooting";
  rep.spec = spec;
  rep.control_kind = to_string(kind);
  rep.control_nodes = cp.nodes;
  rep.control_breakpoints = cp.breakpoints();
  rep.objective_value = res.f;
  rep.iterations = static_cast<std::size_t>(res.iterations);
  rep.converged = res.converged;
  rep.message = res.reason;
  if (failures > 0) rep.message += "; " + std::to_string(failures) + " plant runs failed and were penalized";

  auto run = simulate_control(spec, cp, nlp, layout);
  ++sims;
  rep.simulations = sims;
  if (run.failed) {
    rep.converged = false;
    rep.message += "; final plant run failed: " + run.message;
  } else {
    rep.trajectory = std::move(run.trajectory);
    rep.observables = ocp::compute_observables(*layout, rep.trajectory, spec.average);
    rep.thaw_time = ocp::thawing_time(rep.trajectory);
    if (ocp::is_tracking(spec.objective) && rep.trajectory.size() >= 2)
      rep.error_norm = ocp::tracking_error(spec, *layout, rep.trajectory, nlp.quad_dtau);
  }
  rep.declared_indices = {1};
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace stefan_oc::shooting
