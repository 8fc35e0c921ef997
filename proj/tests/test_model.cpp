#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "stefan_oc/model/params.hpp"
#include "stefan_oc/model/quasi_steady.hpp"
#include "stefan_oc/model/stefan_model.hpp"

using namespace stefan_oc;
using namespace stefan_oc::model;

namespace {

// closed form written out independently of the library
double closed_form_velocity(double s, double tb, const ModelParams& p) {
  return -p.stefan_number * p.k_ratio * p.biot * tb / (s * (p.biot * std::log(1.0 / s) + p.wall_ratio));
}

// state with the solid at the melting point and the steady log profile in the liquid
StefanState log_profile_state(const StefanModel& m, double s, double tb) {
  const auto& p = m.params();
  const std::size_t n = p.n;
  StefanState st;
  st.theta1.assign(n, 0.0);
  st.theta2.resize(n);
  const double amp = p.biot * tb / (p.wall_ratio + p.biot * std::log(1.0 / s));
  for (std::size_t j = 1; j <= n; ++j) {
    const double r = s + (static_cast<double>(j) / n) * (1.0 - s);
    st.theta2[j - 1] = amp * std::log(r / s);
  }
  st.s = s;
  return st;
}

StefanState zeros(const StefanModel& m, double s) {
  StefanState st;
  st.theta1.assign(m.n(), 0.0);
  st.theta2.assign(m.n(), 0.0);
  st.s = s;
  return st;
}

}  // namespace

TEST(Params, DefaultsValidate) { EXPECT_NO_THROW(shipped_defaults().validate()); }

TEST(Params, RejectionsNameTheField) {
  auto check = [](ModelParams p, const std::string& field) {
    try {
      p.validate();
      FAIL() << "accepted invalid " << field;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.field(), field);
    }
  };
  ModelParams p;
  p.eps_front = 0.2;
  check(p, "eps_front");
  p = {};
  p.n = 2;
  check(p, "n");
  p = {};
  p.biot = 0.0;
  check(p, "biot");
  p = {};
  p.stefan_number = -1.0;
  check(p, "stefan_number");
  p = {};
  p.alpha_ratio = NAN;
  check(p, "alpha_ratio");
}

TEST(Model, GridNodes) {
  StefanModel m(shipped_defaults());
  ASSERT_EQ(m.solid_nodes().size(), 21u);
  ASSERT_EQ(m.liquid_nodes().size(), 21u);
  for (std::size_t i = 0; i <= 20; ++i) {
    EXPECT_NEAR(m.solid_nodes()[i], i / 20.0, 1e-15);
    EXPECT_NEAR(m.liquid_nodes()[i], i / 20.0, 1e-15);
  }
  ModelParams p;
  p.n = 3;
  StefanModel small(p);
  EXPECT_EQ(small.solid_nodes().size(), 4u);
  auto d = small.rhs(log_profile_state(small, 0.5, 1.0), 1.0);
  EXPECT_TRUE(std::isfinite(d.ds));
  EXPECT_THROW(make_model(ModelParams{.eps_front = 0.2}), ConfigError);
}

TEST(Model, NoDrivingForceNoMotion) {
  StefanModel m(shipped_defaults());
  auto d = m.rhs(zeros(m, m.s_start()), 0.0);
  for (double v : d.dtheta1) EXPECT_EQ(v, 0.0);
  for (double v : d.dtheta2) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(d.ds, 0.0);
}

TEST(Model, HeatedWallWarmsFirst) {
  // front gradients vanish at the instant; the wall node heats up
  StefanModel m(shipped_defaults());
  auto d = m.rhs(zeros(m, m.s_start()), 1.0);
  EXPECT_EQ(d.ds, 0.0);
  EXPECT_GT(d.dtheta2.back(), 0.0);
  for (std::size_t j = 0; j + 1 < m.n(); ++j) EXPECT_EQ(d.dtheta2[j], 0.0);
}

TEST(Model, QuasiSteadyAgreementAtSmallStefanNumber) {
  ModelParams p;
  p.stefan_number = 0.01;
  StefanModel m(p);
  for (double s : {0.3, 0.5, 0.7, 0.9}) {
    auto d = m.rhs(log_profile_state(m, s, 1.0), 1.0);
    const double qs = closed_form_velocity(s, 1.0, p);
    EXPECT_LT(std::abs(d.ds - qs) / std::abs(qs), 0.05) << "s = " << s;
    EXPECT_NEAR(quasi_steady_velocity(s, 1.0, p), qs, 1e-15);
  }
}

TEST(Model, SteadyProfileIsStationaryInTheLiquid) {
  // with frozen front the log profile solves the liquid equation; only the
  // convective term from the moving front remains
  ModelParams p;
  p.stefan_number = 1e-9;
  StefanModel m(p);
  const double s = 0.5;
  auto d = m.rhs(log_profile_state(m, s, 1.0), 1.0);
  // truncation error only: small against the size of the diffusion term alpha A / s^2
  const double amp = p.biot / (p.wall_ratio + p.biot * std::log(1.0 / s));
  const double scale = p.alpha_ratio * amp / (s * s);
  for (double v : d.dtheta2) EXPECT_LT(std::abs(v), 0.01 * scale);
}

TEST(Model, RhsDomainChecks) {
  StefanModel m(shipped_defaults());
  auto st = zeros(m, 0.5);
  st.s = 1.0;
  EXPECT_THROW(m.rhs(st, 1.0), DomainError);
  st.s = 0.0005;
  EXPECT_THROW(m.rhs(st, 1.0), DomainError);
  st.s = 0.5;
  EXPECT_THROW(m.rhs(st, NAN), DomainError);
  st.theta1.pop_back();
  EXPECT_THROW(m.rhs(st, 1.0), DomainError);
}

TEST(Model, PackUnpackRoundTrip) {
  StefanModel m(shipped_defaults());
  auto st = log_profile_state(m, 0.42, 0.8);
  auto back = m.unpack(m.pack(st));
  EXPECT_EQ(back.theta1, st.theta1);
  EXPECT_EQ(back.theta2, st.theta2);
  EXPECT_EQ(back.s, st.s);
}

TEST(Average, ArithmeticMean) {
  ModelParams p;
  p.n = 4;
  StefanModel m(p);
  auto st = zeros(m, 0.5);
  EXPECT_EQ(m.average_temperature(st), 0.0);
  st.theta2 = {0.5, 0.5, 0.5, 0.5};
  EXPECT_DOUBLE_EQ(m.average_temperature(st), 0.5);
  st.theta2 = {0.1, 0.2, 0.3, 0.4};
  EXPECT_NEAR(m.average_temperature(st), 0.25, 1e-15);
  EXPECT_NEAR(m.average_temperature(st, {.include_wall = false}), 0.2, 1e-15);
}

TEST(Average, AreaWeightedVariant) {
  ModelParams p;
  p.n = 4;
  StefanModel m(p);
  auto st = zeros(m, 0.5);
  st.theta2 = {0.5, 0.5, 0.5, 0.5};
  // constant field: weights sum to one, so the weighted mean is the constant
  EXPECT_NEAR(m.average_temperature(st, {.area_weighted = true}), 0.5, 1e-15);
  st.theta2 = {0.0, 0.0, 0.0, 1.0};
  const double w = m.average_temperature(st, {.area_weighted = true});
  EXPECT_GT(w, 0.0);
  EXPECT_LT(w, 0.25);  // wall node carries half a trapezoid weight
}

TEST(Average, RateMatchesFiniteDifferenceOfMean) {
  StefanModel m(shipped_defaults());
  auto y = m.pack(log_profile_state(m, 0.6, 0.9));
  for (bool weighted : {false, true}) {
    AverageOptions opt{.include_wall = true, .area_weighted = weighted};
    std::vector<double> dy(m.state_size());
    m.evaluate(y, 0.9, dy);
    const double rate = m.average_rate(y, dy, opt);
    const double dt = 1e-7;
    std::vector<double> y1 = y, y0 = y;
    for (std::size_t i = 0; i < y.size(); ++i) {
      y1[i] += dt * dy[i];
      y0[i] -= dt * dy[i];
    }
    const double fd = (m.average_temperature(y1, opt) - m.average_temperature(y0, opt)) / (2 * dt);
    EXPECT_NEAR(rate, fd, 1e-6);
  }
}

TEST(QuasiSteady, ClosedFormBasics) {
  const auto p = shipped_defaults();
  EXPECT_EQ(quasi_steady_velocity(0.5, 0.0, p), 0.0);
  EXPECT_LT(quasi_steady_velocity(0.5, 1.0, p), quasi_steady_velocity(0.5, 0.5, p));
  // default parameters at s = 0.5: -0.26 * 0.5 * 2 / (0.5 (2 ln 2 + 2))
  EXPECT_NEAR(quasi_steady_velocity(0.5, 1.0, p), -(0.26 * 0.5 * 2.0) / (0.5 * (2.0 * std::log(2.0) + 2.0)),
              1e-14);
  EXPECT_NEAR(quasi_steady_velocity(0.5, 1.0, p), -0.15356019, 1e-8);
  EXPECT_DOUBLE_EQ(quasi_steady_velocity(1.0, 1.0, p), -0.26 * 0.5 * 2.0 / 2.0);
  EXPECT_THROW(quasi_steady_velocity(0.0, 1.0, p), DomainError);
  EXPECT_THROW(quasi_steady_velocity(0.5, -0.1, p), DomainError);
}

TEST(QuasiSteady, FeasibleBoundIsCeilingVelocity) {
  const auto p = shipped_defaults();
  for (double s : {0.01, 0.2, 0.5, 0.99})
    EXPECT_EQ(feasible_velocity_bound(s, p), quasi_steady_velocity(s, 1.0, p));
}

TEST(QuasiSteady, ThresholdMatchesBruteForceScan) {
  for (auto p : {shipped_defaults(), ModelParams{.biot = 5.0, .wall_ratio = 1.0}}) {
    double best = -INFINITY;
    for (double s = p.eps_front; s <= 1.0 - p.eps_front + 1e-12; s += 1e-3)
      best = std::max(best, closed_form_velocity(s, 1.0, p));
    EXPECT_NEAR(global_feasibility_threshold(p), best, 1e-5);
  }
  EXPECT_NEAR(global_feasibility_threshold(shipped_defaults()), -0.13, 0.005);
}

TEST(QuasiSteady, MeltTimeEstimate) {
  const auto p = shipped_defaults();
  // trapezoid on a fine grid as an independent quadrature
  double acc = 0.0;
  const int n = 200000;
  const double a = p.eps_front, b = 1.0 - p.eps_front, h = (b - a) / n;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    acc += w / std::abs(closed_form_velocity(a + i * h, 1.0, p));
  }
  EXPECT_NEAR(quasi_steady_melt_time(p), acc * h, 1e-6);
}
