#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>

#include <gtest/gtest.h>

#include "stefan_oc/metrics/bench.hpp"
#include "stefan_oc/metrics/error_norm.hpp"

using namespace stefan_oc;
using namespace stefan_oc::metrics;

namespace {

ErrorSpec velocity(double sp, double d = 0.05) {
  ErrorSpec e;
  e.quantity = Quantity::InterfaceVelocity;
  e.setpoint = sp;
  e.d_tau_sample = d;
  return e;
}

}  // namespace

TEST(ErrorNorm, ExactTrackingIsZero) {
  EXPECT_NEAR(error_norm([](double t) { return 1.0 - 0.1 * t; }, 0.0, 9.0, velocity(-0.1)), 0.0, 1e-13);
}

TEST(ErrorNorm, ConstantOffsetGivesOffset) {
  for (double d : {0.02, -0.03, 0.5})
    EXPECT_NEAR(error_norm([d](double t) { return (0.04 + d) * t; }, 0.0, 5.0, velocity(0.04)), std::abs(d),
                1e-12);
}

TEST(ErrorNorm, SinusoidalRateGivesRmsAmplitude) {
  // q' = sp + sin(2 pi t): forward differences on a fine grid approach 1/sqrt(2)
  const double sp = -0.1;
  auto q = [sp](double t) { return sp * t - std::cos(2.0 * std::numbers::pi * t) / (2.0 * std::numbers::pi); };
  EXPECT_NEAR(error_norm(q, 0.0, 10.0, velocity(sp, 1e-3)), 1.0 / std::sqrt(2.0), 1e-4);
}

TEST(ErrorNorm, NonNegativeAndScalesWithDeviation) {
  auto q1 = [](double t) { return std::sin(t) - 0.1 * t; };
  auto q2 = [](double t) { return 2.0 * std::sin(t) - 0.1 * t; };
  const double e1 = error_norm(q1, 0.0, 6.0, velocity(-0.1));
  const double e2 = error_norm(q2, 0.0, 6.0, velocity(-0.1));
  EXPECT_GT(e1, 0.0);
  EXPECT_NEAR(e2, 2.0 * e1, 1e-12);
}

TEST(ErrorNorm, ResamplingMakesItIndependentOfStoredSamples) {
  // the same dense curve stored at different sample sets gives the same norm
  auto build = [](int per_unit) {
    dae::Trajectory tr;
    tr.kinds = {dae::VarKind::Differential};
    const int m = 4 * per_unit;
    for (int k = 0; k <= m; ++k) {
      const double t = static_cast<double>(k) / per_unit;
      tr.push_sample(t, {0.3 * t * t}, {0.6 * t}, true);
    }
    for (int k = 0; k < m; ++k) {
      dae::DenseSegment s;
      s.t_lo = tr.taus[k];
      s.t_hi = tr.taus[k + 1];
      const double a = s.t_lo, b = s.t_hi, c = 0.5 * (a + b);
      s.t = {a, c, b};
      s.y = {{0.3 * a * a}, {0.3 * c * c}, {0.3 * b * b}};
      tr.segments.push_back(s);
    }
    return tr;
  };
  auto obs = [](std::span<const double> y) { return y[0]; };
  const double coarse = error_norm(build(2), obs, velocity(0.5));
  const double fine = error_norm(build(7), obs, velocity(0.5));
  EXPECT_NEAR(coarse, fine, 1e-12);
  EXPECT_GT(coarse, 0.0);
}

TEST(ErrorNorm, GridCoversSpanWithoutOvershoot) {
  const auto g = sample_grid(0.0, 1.0, 0.3);
  ASSERT_EQ(g.size(), 4u);
  EXPECT_DOUBLE_EQ(g.back(), 0.9);
  const auto h = sample_grid(0.0, 9.98, 0.05);
  EXPECT_LE(h.back(), 9.98);
  EXPECT_EQ(h.size(), 200u);
}

TEST(ErrorNorm, RejectsBadInput) {
  EXPECT_THROW(error_norm([](double t) { return t; }, 0.0, 0.01, velocity(0.0)), DomainError);
  EXPECT_THROW(error_norm([](double t) { return t; }, 0.0, 1.0, velocity(0.0, 0.0)), ConfigError);
  EXPECT_THROW(error_norm([](double t) { return t; }, 0.0, 1.0, velocity(NAN)), ConfigError);
}

TEST(Bench, StableTaskStopsAtMinimumRepeats) {
  int calls = 0;
  auto rep = benchmark(
      [&]() -> std::optional<double> {
        ++calls;
        return 0.25;
      },
      {}, "noop");
  EXPECT_EQ(rep.repeats, 10u);
  EXPECT_EQ(rep.times.size(), 10u);
  EXPECT_EQ(calls, 11);  // one warm-up
  EXPECT_FALSE(rep.flagged);
  EXPECT_EQ(rep.error_norm, 0.25);
  EXPECT_EQ(rep.label, "noop");
}

TEST(Bench, NoisyTaskIsFlaggedAtCap) {
  BenchOptions o;
  o.min_repeats = 3;
  o.max_repeats = 6;
  o.abs_std_floor = 0.0;
  int k = 0;
  auto rep = benchmark(
      [&]() -> std::optional<double> {
        // alternate 0 and 4 ms: std/mean stays near 1
        if (++k % 2) std::this_thread::sleep_for(std::chrono::milliseconds(4));
        return std::nullopt;
      },
      o);
  EXPECT_TRUE(rep.flagged);
  EXPECT_EQ(rep.repeats, 6u);
  EXPECT_GT(rep.rel_std(), 0.05);
  EXPECT_FALSE(rep.error_norm.has_value());
}

TEST(Bench, SampleStandardDeviation) {
  auto [m, s] = mean_and_std({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(m, 2.5);
  EXPECT_DOUBLE_EQ(s, std::sqrt(5.0 / 3.0));
  auto [m1, s1] = mean_and_std({7.0});
  EXPECT_DOUBLE_EQ(m1, 7.0);
  EXPECT_DOUBLE_EQ(s1, 0.0);
}

TEST(Bench, OptionsValidate) {
  BenchOptions o;
  o.min_repeats = 1;
  EXPECT_THROW(o.validate(), ConfigError);
  o = {};
  o.max_repeats = 5;
  EXPECT_THROW(o.validate(), ConfigError);
  o = {};
  o.rel_std = 0.0;
  EXPECT_THROW(o.validate(), ConfigError);
}
