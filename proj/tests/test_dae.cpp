#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "stefan_oc/dae/bdf.hpp"
#include "stefan_oc/dae/collocation.hpp"
#include "stefan_oc/dae/consistent_init.hpp"
#include "stefan_oc/dae/radau.hpp"

using namespace stefan_oc;
using namespace stefan_oc::dae;

namespace {

DaeSystem decay() {
  DaeSystem s;
  s.dim = 1;
  s.kinds = {VarKind::Differential};
  s.semi_explicit = true;
  s.residual = [](double, std::span<const double> y, std::span<const double> yp, std::span<double> r) {
    r[0] = yp[0] + y[0];
  };
  return s;
}

// x' = z, 0 = z - cos(t): x = sin t
DaeSystem cosine_dae() {
  DaeSystem s;
  s.dim = 2;
  s.kinds = {VarKind::Differential, VarKind::Algebraic};
  s.semi_explicit = true;
  s.residual = [](double t, std::span<const double> y, std::span<const double> yp, std::span<double> r) {
    r[0] = yp[0] - y[1];
    r[1] = y[1] - std::cos(t);
  };
  return s;
}

// Robertson kinetics with the conservation law as algebraic row
DaeSystem robertson() {
  DaeSystem s;
  s.dim = 3;
  s.kinds = {VarKind::Differential, VarKind::Differential, VarKind::Algebraic};
  s.semi_explicit = true;
  s.residual = [](double, std::span<const double> y, std::span<const double> yp, std::span<double> r) {
    r[0] = yp[0] - (-0.04 * y[0] + 1e4 * y[1] * y[2]);
    r[1] = yp[1] - (0.04 * y[0] - 1e4 * y[1] * y[2] - 3e7 * y[1] * y[1]);
    r[2] = y[0] + y[1] + y[2] - 1.0;
  };
  return s;
}

// re-evaluate F at enforced samples using the stored slopes
double max_enforced_residual(const DaeSystem& s, const Trajectory& tr) {
  double worst = 0.0;
  std::vector<double> r(s.dim);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (!tr.enforced[i]) continue;
    s.residual(tr.taus[i], tr.values[i], tr.slopes[i], r);
    worst = std::max(worst, inf_norm(r));
  }
  return worst;
}

}  // namespace

TEST(Radau, PointsMatchKnownValues) {
  // two-point Radau IIA: 1/3 and 1
  auto c2 = radau_points(2);
  ASSERT_EQ(c2.size(), 2u);
  EXPECT_NEAR(c2[0], 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(c2[1], 1.0, 1e-14);
  // three-point: (4 -+ sqrt 6)/10, 1
  auto c3 = radau_points(3);
  EXPECT_NEAR(c3[0], (4.0 - std::sqrt(6.0)) / 10.0, 1e-14);
  EXPECT_NEAR(c3[1], (4.0 + std::sqrt(6.0)) / 10.0, 1e-14);
  for (int m = 2; m <= 8; ++m) {
    auto c = radau_points(m);
    EXPECT_EQ(c.size(), static_cast<std::size_t>(m));
    EXPECT_DOUBLE_EQ(c.back(), 1.0);
    for (std::size_t k = 1; k < c.size(); ++k) EXPECT_LT(c[k - 1], c[k]);
  }
}

TEST(Radau, DiffMatrixIsExactOnPolynomials) {
  std::vector<double> x{0.0, 0.2, 0.5, 0.9, 1.0};
  auto d = lagrange_diff_matrix(x);
  for (std::size_t k = 0; k < x.size(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) acc += d[k][j] * x[j] * x[j] * x[j];
    EXPECT_NEAR(acc, 3.0 * x[k] * x[k], 1e-12);
  }
}

TEST(Bdf, ExponentialDecay) {
  auto tr = integrate_index1(decay(), {1.0}, {0.0, 1.0}, 1e-11);
  EXPECT_DOUBLE_EQ(tr.back(), 1.0);
  EXPECT_NEAR(tr.values.back()[0], std::exp(-1.0), 1e-8);
  for (std::size_t i = 1; i < tr.size(); ++i) EXPECT_GT(tr.taus[i], tr.taus[i - 1]);
}

TEST(Bdf, ReachesHigherOrdersOnSmoothProblems) {
  auto loose = integrate_index1(decay(), {1.0}, {0.0, 10.0}, 1e-6);
  auto tight = integrate_index1(decay(), {1.0}, {0.0, 10.0}, 1e-10);
  // fifth-order behaviour: 1e4 tighter tolerance costs far less than 1e4 more steps
  EXPECT_LT(tight.stats.steps, 12 * loose.stats.steps);
  EXPECT_NEAR(tight.values.back()[0], std::exp(-10.0), 1e-9);
}

TEST(Bdf, CosineIndexOne) {
  auto sys = cosine_dae();
  auto tr = integrate_index1(sys, {0.0, 1.0}, {0.0, 2.0 * std::numbers::pi}, 1e-10);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_NEAR(tr.values[i][0], std::sin(tr.taus[i]), 1e-6);
    EXPECT_NEAR(tr.values[i][1], std::cos(tr.taus[i]), 1e-9);
  }
  // dense output between samples
  for (double t = 0.05; t < 6.2; t += 0.173) EXPECT_NEAR(tr.at(t)[0], std::sin(t), 1e-6);
  EXPECT_LE(max_enforced_residual(sys, tr), 1e-8);
}

TEST(Bdf, RobertsonReference) {
  auto sys = robertson();
  auto tr = integrate_index1(sys, {1.0, 0.0, 0.0}, {0.0, 40.0}, 1e-9);
  const auto& y = tr.values.back();
  // reference values at t = 40 (Hairer & Wanner test set)
  EXPECT_NEAR(y[0], 0.7158270687, 2e-6);
  EXPECT_NEAR(y[1], 9.185534764e-6, 2e-9);
  EXPECT_NEAR(y[2], 0.2841637457, 2e-6);
}

TEST(Bdf, InconsistentStartIsRejected) {
  EXPECT_THROW(integrate_index1(cosine_dae(), {0.0, 0.3}, {0.0, 1.0}, 1e-8), InitializationError);
}

TEST(Bdf, RejectsHighIndexHint) {
  auto sys = decay();
  sys.index_hint = 2;
  EXPECT_THROW(integrate_index1(sys, {1.0}, {0.0, 1.0}, 1e-8), ConfigError);
}

TEST(Bdf, FailureCarriesLastGoodState) {
  auto sys = decay();
  sys.residual = [](double t, std::span<const double> y, std::span<const double> yp, std::span<double> r) {
    if (t > 0.5) throw DomainError("outside");
    r[0] = yp[0] + y[0];
  };
  try {
    integrate_index1(sys, {1.0}, {0.0, 1.0}, 1e-8);
    FAIL() << "expected failure";
  } catch (const IntegrationFailure& f) {
    EXPECT_LE(f.tau(), 0.5);
    EXPECT_GT(f.tau(), 0.49);
    ASSERT_EQ(f.last_state().size(), 1u);
    EXPECT_NEAR(f.last_state()[0], std::exp(-f.tau()), 1e-6);
  }
}

TEST(Bdf, EventLocation) {
  // y' = 1 from 0: crosses 0.3 at t = 0.3
  DaeSystem sys;
  sys.dim = 1;
  sys.kinds = {VarKind::Differential};
  sys.semi_explicit = true;
  sys.residual = [](double, std::span<const double>, std::span<const double> yp, std::span<double> r) {
    r[0] = yp[0] - 1.0;
  };
  sys.stop_events.push_back({"hit", [](double, std::span<const double> y) { return y[0] - 0.3; },
                             Crossing::Rising});
  auto tr = integrate_index1(sys, {0.0}, {0.0, 1.0}, 1e-8);
  ASSERT_EQ(tr.events.size(), 1u);
  EXPECT_NEAR(tr.events[0].tau, 0.3, 1e-8);
  EXPECT_NEAR(tr.back(), 0.3, 1e-8);
  EXPECT_NEAR(tr.values.back()[0], 0.3, 1e-8);

  // wrong direction never fires
  sys.stop_events[0].direction = Crossing::Falling;
  auto tr2 = integrate_index1(sys, {0.0}, {0.0, 1.0}, 1e-8);
  EXPECT_TRUE(tr2.events.empty());
  EXPECT_DOUBLE_EQ(tr2.back(), 1.0);
}

TEST(Bdf, BreakpointsRestartOnJumpingInput) {
  // x' = z, z = u(t) with u = 1 on [0, 0.5], 3 after: x(1) = 0.5 + 1.5
  DaeSystem sys;
  sys.dim = 2;
  sys.kinds = {VarKind::Differential, VarKind::Algebraic};
  sys.semi_explicit = true;
  sys.breakpoints = {0.5};
  sys.residual = [](double t, std::span<const double> y, std::span<const double> yp, std::span<double> r) {
    const double u = t <= 0.5 ? 1.0 : 3.0;
    r[0] = yp[0] - y[1];
    r[1] = y[1] - u;
  };
  auto tr = integrate_index1(sys, {0.0, 1.0}, {0.0, 1.0}, 1e-10);
  EXPECT_NEAR(tr.values.back()[0], 2.0, 1e-9);
  EXPECT_NEAR(tr.at(0.75)[0], 0.5 + 0.75, 1e-9);
}

TEST(Collocation, ConfigValidation) {
  CollocationConfig c;
  c.nodes = 9;
  EXPECT_THROW(c.validate(), ConfigError);
  c.nodes = 1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.d_tau = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.newton_tol = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Collocation, CosineMatchesBdf) {
  auto sys = cosine_dae();
  CollocationConfig cfg;
  cfg.d_tau = 0.1;
  auto col = collocate(sys, {0.0, 0.5}, {0.0, 2.0}, cfg);
  auto bdf = integrate_index1(sys, {0.0, 1.0}, {0.0, 2.0}, 1e-10);
  for (std::size_t i = 1; i < bdf.size(); ++i) {
    const auto a = col.at(bdf.taus[i]);
    EXPECT_NEAR(a[0], bdf.values[i][0], 1e-5);
    EXPECT_NEAR(a[0], std::sin(bdf.taus[i]), 1e-6);
  }
  EXPECT_LE(max_enforced_residual(sys, col), cfg.newton_tol);
}

TEST(Collocation, DecayAccuracyAndOrder) {
  auto sys = decay();
  auto err = [&](double d) {
    CollocationConfig cfg;
    cfg.d_tau = d;
    cfg.nodes = 2;
    auto tr = collocate(sys, {1.0}, {0.0, 2.0}, cfg);
    double e = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i)
      e = std::max(e, std::abs(tr.values[i][0] - std::exp(-tr.taus[i])));
    return e;
  };
  const double e1 = err(0.2), e2 = err(0.1);
  EXPECT_GT(e1 / e2, 4.0);
  CollocationConfig cfg;
  auto tr = collocate(sys, {1.0}, {0.0, 1.0}, cfg);
  EXPECT_NEAR(tr.values.back()[0], std::exp(-1.0), 1e-8);
  EXPECT_DOUBLE_EQ(tr.back(), 1.0);
}

TEST(Collocation, HalvingElementsShrinksErrorOnIndexOneTest) {
  auto sys = cosine_dae();
  auto err = [&](double d) {
    CollocationConfig cfg;
    cfg.d_tau = d;
    cfg.nodes = 2;
    auto tr = collocate(sys, {0.0, 1.0}, {0.0, 3.0}, cfg);
    double e = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i)
      e = std::max(e, std::abs(tr.values[i][0] - std::sin(tr.taus[i])));
    return e;
  };
  EXPECT_GT(err(0.3) / err(0.15), 4.0);
}

TEST(Collocation, HighIndexWithoutReduction) {
  // index 3: x1' = x2, x2' = x3, 0 = x1 - sin t  ->  x3 = -sin t
  DaeSystem sys;
  sys.dim = 3;
  sys.kinds = {VarKind::Differential, VarKind::Differential, VarKind::Algebraic};
  sys.semi_explicit = true;
  sys.index_hint = 3;
  sys.residual = [](double t, std::span<const double> y, std::span<const double> yp, std::span<double> r) {
    r[0] = yp[0] - y[1];
    r[1] = yp[1] - y[2];
    r[2] = y[0] - std::sin(t);
  };
  CollocationConfig cfg;
  cfg.d_tau = 0.05;
  auto tr = collocate(sys, {0.0, 1.0, 0.0}, {0.0, 1.0}, cfg);
  EXPECT_LE(max_enforced_residual(sys, tr), cfg.newton_tol);
  EXPECT_NEAR(tr.values.back()[0], std::sin(1.0), 1e-8);
  EXPECT_NEAR(tr.values.back()[1], std::cos(1.0), 1e-6);
  EXPECT_NEAR(tr.values.back()[2], -std::sin(1.0), 1e-3);
}

TEST(Collocation, EventLocation) {
  DaeSystem sys;
  sys.dim = 1;
  sys.kinds = {VarKind::Differential};
  sys.semi_explicit = true;
  sys.residual = [](double, std::span<const double>, std::span<const double> yp, std::span<double> r) {
    r[0] = yp[0] - 1.0;
  };
  sys.stop_events.push_back({"hit", [](double, std::span<const double> y) { return y[0] - 0.33; },
                             Crossing::Rising});
  CollocationConfig cfg;
  cfg.d_tau = 0.12;
  auto tr = collocate(sys, {0.0}, {0.0, 1.0}, cfg);
  ASSERT_EQ(tr.events.size(), 1u);
  EXPECT_NEAR(tr.events[0].tau, 0.33, 1e-8);
  EXPECT_NEAR(tr.back(), 0.33, 1e-8);
}

TEST(Collocation, OverflowGuard) {
  CollocationConfig cfg;
  cfg.d_tau = 1e-3;
  cfg.max_elements = 10;
  EXPECT_THROW(collocate(decay(), {1.0}, {0.0, 1.0}, cfg), ConfigError);
}

TEST(Collocation, StagnationReportsElement) {
  // z^2 + 1 = 0 has no real root
  DaeSystem sys;
  sys.dim = 2;
  sys.kinds = {VarKind::Differential, VarKind::Algebraic};
  sys.semi_explicit = true;
  sys.residual = [](double t, std::span<const double> y, std::span<const double> yp, std::span<double> r) {
    r[0] = yp[0] - y[1];
    r[1] = y[1] * y[1] + (t > 0.25 ? 1.0 : -1.0);
  };
  CollocationConfig cfg;
  cfg.d_tau = 0.1;
  try {
    collocate(sys, {0.0, 1.0}, {0.0, 1.0}, cfg);
    FAIL() << "expected failure";
  } catch (const CollocationFailure& f) {
    EXPECT_EQ(f.element(), 2u);
    EXPECT_GT(f.residual_norm(), cfg.newton_tol);
  }
}

TEST(ConsistentInit, SolvesScalarAlgebraicUnknown) {
  auto sys = cosine_dae();
  auto r = consistent_init(sys, 0.3, {0.0, 5.0});
  EXPECT_TRUE(r.feasible);
  EXPECT_NEAR(r.y[1], std::cos(0.3), 1e-12);
  EXPECT_NEAR(r.yp[0], std::cos(0.3), 1e-12);
  EXPECT_LE(r.residual, 1e-10);
}

TEST(ConsistentInit, RootOutsideBoundsIsClipped) {
  auto sys = cosine_dae();
  sys.bounds = {std::nullopt, Bounds{0.0, 0.5}};
  auto r = consistent_init(sys, 0.0, {0.0, 0.2});
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.clipped_var, 1);
  EXPECT_DOUBLE_EQ(r.y[1], 0.5);
}

TEST(ConsistentInit, CouplingHookMovesDifferentialData) {
  // x' = z, 0 = x - 2 with x tied to z by the hook: x = 4 z  ->  z = 0.5
  auto sys = cosine_dae();
  sys.residual = [](double, std::span<const double> y, std::span<const double> yp, std::span<double> r) {
    r[0] = yp[0] - y[1];
    r[1] = y[0] - 2.0;
  };
  InitOptions opt;
  opt.coupling = [](std::span<double> y) { y[0] = 4.0 * y[1]; };
  auto r = consistent_init(sys, 0.0, {0.0, 0.0}, opt);
  EXPECT_NEAR(r.y[1], 0.5, 1e-10);
  EXPECT_NEAR(r.y[0], 2.0, 1e-10);
}

TEST(ConsistentInit, NoRootRaises) {
  DaeSystem sys = cosine_dae();
  sys.residual = [](double, std::span<const double> y, std::span<const double> yp, std::span<double> r) {
    r[0] = yp[0] - y[1];
    r[1] = y[1] * y[1] + 1.0;
  };
  EXPECT_THROW(consistent_init(sys, 0.0, {0.0, 1.0}), InitializationError);
}

TEST(Trajectory, AppendDropsJunctionSample) {
  auto sys = decay();
  auto a = integrate_index1(sys, {1.0}, {0.0, 0.5}, 1e-10);
  auto b = integrate_index1(sys, a.values.back(), {0.5, 1.0}, 1e-10);
  const auto na = a.size(), nb = b.size();
  a.append(b);
  EXPECT_EQ(a.size(), na + nb - 1);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_GT(a.taus[i], a.taus[i - 1]);
  EXPECT_NEAR(a.at(0.75)[0], std::exp(-0.75), 1e-8);
  EXPECT_THROW(a.at(1.5), DomainError);
}
