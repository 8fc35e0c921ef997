#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "stefan_oc/ocp/simulate.hpp"
#include "stefan_oc/shooting/shooting.hpp"

using namespace stefan_oc;
using namespace stefan_oc::shooting;

namespace {

ocp::OcpSpec rate_spec() {
  ocp::OcpSpec s;
  s.objective = ocp::TrackTemperatureRate{0.04};
  return s;
}

ocp::OcpSpec velocity_spec() {
  ocp::OcpSpec s;
  s.objective = ocp::TrackInterfaceVelocity{-0.1};
  return s;
}

NlpConfig rate_nlp() {
  NlpConfig n;
  n.horizon = 7.5;
  return n;
}

ocp::SimOptions rate_sim() {
  ocp::SimOptions o;
  o.backend = ocp::Backend::Collocation;
  o.colloc.d_tau = 0.12;
  return o;
}

ocp::SimOptions velocity_sim() {
  ocp::SimOptions o;
  o.colloc.d_tau = 0.37;
  return o;
}

double interp(const std::vector<double>& x, const std::vector<double>& y, double t) {
  auto it = std::upper_bound(x.begin(), x.end(), t);
  if (it == x.begin()) return y.front();
  if (it == x.end()) return y.back();
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  const double w = (t - x[i - 1]) / (x[i] - x[i - 1]);
  return (1.0 - w) * y[i - 1] + w * y[i];
}

}  // namespace

// ---- control parameterization ------------------------------------------------

TEST(Control, LinearMidpoint) {
  auto cp = ControlParam::uniform(ControlKind::PiecewiseLinear, 1, 0.0, 0.0, 2.0);
  cp.nodes = {0.0, 1.0};
  EXPECT_DOUBLE_EQ(eval_control(cp, 1.0), 0.5);
}

TEST(Control, ConstantEverywhere) {
  auto cp = ControlParam::uniform(ControlKind::PiecewiseConstant, 5, 0.7, 0.0, 3.0);
  for (double t = 0.0; t <= 3.0; t += 0.01) ASSERT_DOUBLE_EQ(eval_control(cp, t), 0.7);
}

TEST(Control, BreakpointsHitNodesExactly) {
  auto cp = ControlParam::uniform(ControlKind::PiecewiseLinear, 12, 0.0, 0.0, 9.98);
  for (std::size_t k = 0; k < cp.nodes.size(); ++k) cp.nodes[k] = 0.05 * static_cast<double>(k) + 0.01;
  const auto b = cp.breakpoints();
  ASSERT_EQ(b.size(), 13u);
  for (std::size_t k = 0; k < b.size(); ++k) EXPECT_EQ(eval_control(cp, b[k]), cp.nodes[k]) << k;
}

TEST(Control, ConstantIntervalsAreLeftContinuous) {
  auto cp = ControlParam::uniform(ControlKind::PiecewiseConstant, 3, 0.0, 0.0, 3.0);
  cp.nodes = {0.1, 0.2, 0.3};
  EXPECT_EQ(eval_control(cp, 0.0), 0.1);
  EXPECT_EQ(eval_control(cp, 1.0), 0.1);
  EXPECT_EQ(eval_control(cp, 1.5), 0.2);
  EXPECT_EQ(eval_control(cp, 3.0), 0.3);
}

TEST(Control, OutsideHorizonIsDomainError) {
  auto cp = ControlParam::uniform(ControlKind::PiecewiseLinear, 4, 0.5, 0.0, 1.0);
  EXPECT_THROW(eval_control(cp, -0.1), DomainError);
  EXPECT_THROW(eval_control(cp, 1.1), DomainError);
  EXPECT_DOUBLE_EQ(eval_control_held(cp, 5.0), 0.5);
}

TEST(Control, ValidationNamesTheField) {
  auto cp = ControlParam::uniform(ControlKind::PiecewiseLinear, 4, 0.5, 0.0, 1.0);
  cp.nodes.pop_back();
  EXPECT_THROW(cp.validate(), ConfigError);
  cp = ControlParam::uniform(ControlKind::PiecewiseConstant, 4, 1.5, 0.0, 1.0);
  EXPECT_THROW(cp.validate(), ConfigError);
  EXPECT_THROW(parse_control_kind("cubic"), ConfigError);
  EXPECT_EQ(node_count(ControlKind::PiecewiseConstant, 12), 12u);
  EXPECT_EQ(node_count(ControlKind::PiecewiseLinear, 12), 13u);
}

TEST(Control, NlpConfigRejectsNonPositive) {
  NlpConfig n;
  n.fd_step = 0.0;
  EXPECT_THROW(n.validate(), ConfigError);
  n = {};
  n.max_iter = 0;
  EXPECT_THROW(n.validate(), ConfigError);
}

// ---- optimizer ----------------------------------------------------------------

TEST(Optimizer, BoxQuadraticLandsOnProjection) {
  const std::vector<double> c{-0.5, 0.3, 1.7, 0.9};
  auto f = [&](const std::vector<double>& x) {
    double v = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) v += (1.0 + i) * (x[i] - c[i]) * (x[i] - c[i]);
    return v;
  };
  auto g = [&](const std::vector<double>& x, double) {
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = 2.0 * (1.0 + i) * (x[i] - c[i]);
    return d;
  };
  const std::vector<double> lo(4, 0.0), hi(4, 1.0);
  auto r = projected_lbfgs(f, g, std::vector<double>(4, 0.5), lo, hi);
  EXPECT_TRUE(r.converged) << r.reason;
  const std::vector<double> want{0.0, 0.3, 1.0, 0.9};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r.x[i], want[i], 1e-7);
  EXPECT_EQ(r.x[0], 0.0);
  EXPECT_EQ(r.x[2], 1.0);
  for (std::size_t k = 1; k < r.history.size(); ++k) EXPECT_LE(r.history[k], r.history[k - 1]);
  EXPECT_LE(r.projected_gradient, 1e-7);
}

TEST(Optimizer, RosenbrockInBox) {
  auto f = [](const std::vector<double>& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  auto g = [](const std::vector<double>& x, double) {
    return std::vector<double>{-400.0 * x[0] * (x[1] - x[0] * x[0]) - 2.0 * (1.0 - x[0]),
                               200.0 * (x[1] - x[0] * x[0])};
  };
  BoxOptions o;
  o.max_iter = 500;
  auto r = projected_lbfgs(f, g, {0.2, 0.8}, {0.0, 0.0}, {2.0, 0.5}, o);
  // the unconstrained minimizer (1, 1) is cut off; optimum sits on x1 = 0.5
  EXPECT_NEAR(r.x[1], 0.5, 1e-9);
  EXPECT_NEAR(r.x[0], 0.708560, 1e-4);
  for (std::size_t k = 1; k < r.history.size(); ++k) EXPECT_LE(r.history[k], r.history[k - 1]);
  for (double v : r.x) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 2.0);
  }
}

TEST(Optimizer, MaxIterFlagsNonConvergence) {
  auto f = [](const std::vector<double>& x) { return std::pow(x[0] - 0.3, 2) + 10.0 * std::pow(x[1] - 0.7, 2); };
  auto g = [](const std::vector<double>& x, double) {
    return std::vector<double>{2.0 * (x[0] - 0.3), 20.0 * (x[1] - 0.7)};
  };
  BoxOptions o;
  o.max_iter = 1;
  auto r = projected_lbfgs(f, g, {0.9, 0.1}, {0.0, 0.0}, {1.0, 1.0}, o);
  EXPECT_FALSE(r.converged);
  EXPECT_LT(r.f, f({0.9, 0.1}));
}

// ---- plant runs and objective ---------------------------------------------------

TEST(Plant, ResumeFromCheckpointMatchesFullRun) {
  const auto spec = velocity_spec();
  NlpConfig nlp;
  auto cp = ControlParam::uniform(ControlKind::PiecewiseLinear, 4, 0.6, 0.0, 9.98);
  auto base = simulate_control(spec, cp, nlp);
  ASSERT_FALSE(base.failed) << base.message;
  ASSERT_FALSE(base.checkpoints.empty());
  for (std::size_t i : {2u, 4u}) {
    auto c = cp;
    c.nodes[i] += 1e-3;
    auto full = simulate_control(spec, c, nlp);
    auto resumed = simulate_control(spec, c, nlp, nullptr, &base, unaffected_breakpoint(c.kind, i));
    ASSERT_EQ(full.trajectory.size(), resumed.trajectory.size()) << i;
    for (std::size_t k = 0; k < full.trajectory.size(); ++k) {
      ASSERT_EQ(full.trajectory.taus[k], resumed.trajectory.taus[k]);
      ASSERT_EQ(full.trajectory.values[k], resumed.trajectory.values[k]);
    }
  }
}

TEST(Plant, UnaffectedPrefixByKind) {
  EXPECT_EQ(unaffected_breakpoint(ControlKind::PiecewiseConstant, 3), 3u);
  EXPECT_EQ(unaffected_breakpoint(ControlKind::PiecewiseLinear, 3), 2u);
  EXPECT_EQ(unaffected_breakpoint(ControlKind::PiecewiseLinear, 0), 0u);
}

TEST(Objective, MinTimeNonincreasingInEachNode) {
  ocp::OcpSpec spec;
  NlpConfig nlp;
  const double t1 = control_horizon(spec, nlp);
  auto cp = ControlParam::uniform(ControlKind::PiecewiseConstant, 4, 0.6, 0.0, t1);
  const double f0 = objective(spec, cp, nlp).value;
  for (std::size_t i = 0; i < cp.nodes.size(); ++i) {
    auto c = cp;
    c.nodes[i] = 0.9;
    EXPECT_LE(objective(spec, c, nlp).value, f0 + 1e-9) << i;
  }
}

TEST(Objective, ExactTrackingSitsNearZero) {
  // a heater that follows the simulation-based solution drives the integrand to the quadrature floor
  const auto spec = velocity_spec();
  auto sim = ocp::solve_simulation_based(spec, velocity_sim());
  const auto& o = sim.observables;
  NlpConfig nlp;
  auto cp = ControlParam::uniform(ControlKind::PiecewiseLinear, 48, 0.5, 0.0, o.tau.back());
  const auto b = cp.breakpoints();
  for (std::size_t k = 0; k < b.size(); ++k) cp.nodes[k] = std::clamp(interp(o.tau, o.theta_b, b[k]), 0.0, 1.0);
  const auto ov = objective(spec, cp, nlp);
  EXPECT_FALSE(ov.failed);
  EXPECT_LT(ov.value, 1e-5);
}

TEST(Objective, SimulationControlBeatsFlatGuess) {
  const auto spec = rate_spec();
  const auto nlp = rate_nlp();
  auto sim = ocp::solve_simulation_based(spec, rate_sim());
  auto flat = ControlParam::uniform(ControlKind::PiecewiseLinear, 16, 0.5, 0.0, *nlp.horizon);
  auto sampled = flat;
  const auto b = flat.breakpoints();
  for (std::size_t k = 0; k < b.size(); ++k)
    sampled.nodes[k] = interp(sim.observables.tau, sim.observables.theta_b, b[k]);
  const auto a = objective(spec, flat, nlp);
  const auto c = objective(spec, sampled, nlp);
  ASSERT_FALSE(a.failed);
  ASSERT_FALSE(c.failed);
  EXPECT_LT(c.value, a.value);
}

TEST(Objective, FailedRunIsPenalized) {
  const auto spec = velocity_spec();
  NlpConfig nlp;
  PlantRun bad;
  bad.failed = true;
  bad.message = "boom";
  ocp::StateLayout layout(std::make_shared<model::StefanModel>(spec.model));
  auto ov = objective_of_run(spec, bad, nlp, layout);
  EXPECT_TRUE(ov.failed);
  EXPECT_EQ(ov.value, nlp.penalty);
}

TEST(Objective, HorizonDefaults) {
  NlpConfig nlp;
  EXPECT_NEAR(control_horizon(velocity_spec(), nlp), 0.998 / 0.1, 1e-12);
  EXPECT_THROW(control_horizon(rate_spec(), nlp), ConfigError);
  EXPECT_DOUBLE_EQ(control_horizon(rate_spec(), rate_nlp()), 7.5);
}

// ---- shooting solves ------------------------------------------------------------

TEST(Shooting, MinTimeDrivesEveryNodeToCeiling) {
  ocp::OcpSpec spec;
  for (auto kind : {ControlKind::PiecewiseConstant, ControlKind::PiecewiseLinear}) {
    auto rep = solve_shooting(spec, kind, 4);
    ASSERT_EQ(rep.control_nodes.size(), node_count(kind, 4));
    for (double v : rep.control_nodes) EXPECT_NEAR(v, 1.0, 1e-6) << to_string(kind);
    auto sim = ocp::solve_simulation_based(spec);
    ASSERT_TRUE(rep.thaw_time && sim.thaw_time);
    EXPECT_NEAR(*rep.thaw_time, *sim.thaw_time, 1e-4 * *sim.thaw_time);
  }
}

TEST(Shooting, VelocityTrackingAgreesWithSimulation) {
  const auto spec = velocity_spec();
  auto rep = solve_shooting(spec, ControlKind::PiecewiseLinear, 12);
  auto sim = ocp::solve_simulation_based(spec, velocity_sim());
  for (double v : rep.control_nodes) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  ASSERT_TRUE(rep.error_norm.has_value());
  EXPECT_LT(*rep.error_norm, 1e-3);
  const auto& o = sim.observables;
  for (std::size_t k = 0; k < rep.control_breakpoints.size(); ++k) {
    const double t = rep.control_breakpoints[k];
    if (t > o.tau.back()) continue;
    EXPECT_NEAR(rep.control_nodes[k], interp(o.tau, o.theta_b, t), 0.05) << t;
  }
  EXPECT_GT(rep.simulations, rep.iterations);
}

TEST(Shooting, RateTrackingAgreesWithSimulationAfterInitialLayer) {
  const auto spec = rate_spec();
  auto rep = solve_shooting(spec, ControlKind::PiecewiseLinear, 16, rate_nlp());
  auto sim = ocp::solve_simulation_based(spec, rate_sim());
  ASSERT_TRUE(rep.error_norm.has_value());
  EXPECT_LT(*rep.error_norm, 1e-2);
  const auto& o = sim.observables;
  // the consistent heater value at tau = 0 relaxes within a fraction of one
  // control interval, which no linear segment can follow
  for (std::size_t k = 1; k < rep.control_breakpoints.size(); ++k) {
    const double t = rep.control_breakpoints[k];
    if (t > o.tau.back()) continue;
    EXPECT_NEAR(rep.control_nodes[k], interp(o.tau, o.theta_b, t), 0.05) << t;
  }
}
