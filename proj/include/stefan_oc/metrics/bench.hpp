#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stefan_oc/core/errors.hpp"

namespace stefan_oc::metrics {

struct BenchOptions {
  std::size_t min_repeats = 10;
  std::size_t max_repeats = 100;
  double rel_std = 0.05;
  /// std below this (seconds) counts as stable whatever the mean
  double abs_std_floor = 1e-6;

  void validate() const {
    if (min_repeats < 2) throw ConfigError("min_repeats", "need at least 2 timed runs");
    if (max_repeats < min_repeats) throw ConfigError("max_repeats", "must be >= min_repeats");
    if (!(rel_std > 0.0)) throw ConfigError("rel_std", "must be > 0");
    if (!(abs_std_floor >= 0.0)) throw ConfigError("abs_std_floor", "must be >= 0");
  }
};

struct BenchReport {
  std::string label;
  double mean_wall_time = 0.0;
  double std_wall_time = 0.0;  ///< sample standard deviation
  std::size_t repeats = 0;
  std::vector<double> times;  ///< timed runs, warm-up excluded
  std::optional<double> error_norm;
  bool flagged = false;  ///< hit max_repeats before the spread settled

  double rel_std() const { return mean_wall_time > 0.0 ? std_wall_time / mean_wall_time : INFINITY; }
};

inline std::pair<double, double> mean_and_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  if (v.size() < 2) return {m, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

/**
 * Time a deterministic task: one discarded warm-up run, then repeats until
 * there are at least min_repeats and std/mean < rel_std. The task returns
 * the error norm of its result, if it has one; the last run's value is kept.
 */
inline BenchReport benchmark(const std::function<std::optional<double>()>& task, const BenchOptions& opt = {},
                             std::string label = {}) {
  opt.validate();
  using clock = std::chrono::steady_clock;
  BenchReport rep;
  rep.label = std::move(label);
  rep.error_norm = task();
  while (true) {
    const auto a = clock::now();
    rep.error_norm = task();
    rep.times.push_back(std::chrono::duration<double>(clock::now() - a).count());
    const auto [m, s] = mean_and_std(rep.times);
    rep.mean_wall_time = m;
    rep.std_wall_time = s;
    rep.repeats = rep.times.size();
    if (rep.repeats < opt.min_repeats) continue;
    if (s < opt.rel_std * m || s <= opt.abs_std_floor) break;
    if (rep.repeats >= opt.max_repeats) {
      rep.flagged = true;
      break;
    }
  }
  return rep;
}

}  // namespace stefan_oc::metrics
