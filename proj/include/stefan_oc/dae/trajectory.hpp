#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "stefan_oc/core/errors.hpp"
#include "stefan_oc/dae/system.hpp"

namespace stefan_oc::dae {

/// Value and first derivative of the Lagrange interpolant through (t[k], y[k]) at x.
inline void lagrange_eval(std::span<const double> t, const std::vector<const double*>& y,
                          std::size_t comp_begin, std::size_t comp_end, double x,
                          double* value, double* slope) {
  const std::size_t m = t.size();
  for (std::size_t c = comp_begin; c < comp_end; ++c) {
    if (value) value[c] = 0.0;
    if (slope) slope[c] = 0.0;
  }
  for (std::size_t k = 0; k < m; ++k) {
    double lk = 1.0;
    double dk = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == k) continue;
      const double inv = 1.0 / (t[k] - t[j]);
      dk = dk * (x - t[j]) * inv + lk * inv;
      lk *= (x - t[j]) * inv;
    }
    for (std::size_t c = comp_begin; c < comp_end; ++c) {
      if (value) value[c] += lk * y[k][c];
      if (slope) slope[c] += dk * y[k][c];
    }
  }
}

/**
 * Polynomial piece of the dense output on [t_lo, t_hi].
 *
 * Every variable interpolates through all nodes except algebraic variables
 * when `algebraic_skip_first` is set; those skip node 0 (collocation keeps no
 * continuity for algebraic states across elements).
 */
struct DenseSegment {
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::vector<double> t;
  std::vector<std::vector<double>> y;
  bool algebraic_skip_first = false;

  void eval(const std::vector<VarKind>& kinds, double x, double* value, double* slope) const {
    std::vector<const double*> rows;
    rows.reserve(y.size());
    for (const auto& r : y) rows.push_back(r.data());
    const std::size_t dim = kinds.size();
    if (!algebraic_skip_first) {
      lagrange_eval(t, rows, 0, dim, x, value, slope);
      return;
    }
    std::vector<double> v(dim), d(dim);
    lagrange_eval(t, rows, 0, dim, x, v.data(), d.data());
    std::vector<const double*> tail(rows.begin() + 1, rows.end());
    std::vector<double> va(dim), da(dim);
    lagrange_eval(std::span<const double>(t).subspan(1), tail, 0, dim, x, va.data(), da.data());
    for (std::size_t c = 0; c < dim; ++c) {
      const bool alg = kinds[c] == VarKind::Algebraic;
      if (value) value[c] = alg ? va[c] : v[c];
      if (slope) slope[c] = alg ? da[c] : d[c];
    }
  }
};

struct EventRecord {
  double tau = 0.0;
  std::string id;
  Crossing direction = Crossing::Either;
};

struct SolverStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t newton_iterations = 0;
  std::size_t residual_evals = 0;
  std::size_t jacobians = 0;
  std::size_t elements = 0;
};

/**
 * Sampled solution with dense output. `slopes` holds the derivative the
 * solver used at each sample and `enforced` marks samples where F = 0 was
 * imposed (accepted steps, collocation points).
 */
struct Trajectory {
  std::vector<VarKind> kinds;
  std::vector<double> taus;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> slopes;
  std::vector<char> enforced;
  std::vector<EventRecord> events;
  std::vector<DenseSegment> segments;
  SolverStats stats;

  std::size_t dim() const { return kinds.size(); }
  std::size_t size() const { return taus.size(); }
  bool empty() const { return taus.empty(); }
  double front() const { return taus.front(); }
  double back() const { return taus.back(); }

  void push_sample(double tau, std::vector<double> y, std::vector<double> yp, bool is_enforced) {
    taus.push_back(tau);
    values.push_back(std::move(y));
    slopes.push_back(std::move(yp));
    enforced.push_back(is_enforced ? 1 : 0);
  }

  /// Dense-output value; a segment boundary belongs to the segment on its left.
  std::vector<double> at(double tau) const {
    std::vector<double> v(dim());
    eval(tau, v.data(), nullptr);
    return v;
  }

  std::vector<double> derivative_at(double tau) const {
    std::vector<double> d(dim());
    eval(tau, nullptr, d.data());
    return d;
  }

  /**
   * Concatenate a continuation that starts where this one ends. The
   * continuation's first sample duplicates the junction time and is dropped.
   */
  void append(const Trajectory& next) {
    if (next.empty()) return;
    if (empty()) {
      *this = next;
      return;
    }
    const double tol = 1e-12 * std::max(1.0, std::abs(back()));
    if (next.front() < back() - tol) throw DomainError("continuation starts before trajectory end");
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (next.taus[i] <= back() + tol) continue;
      push_sample(next.taus[i], next.values[i], next.slopes[i], next.enforced[i] != 0);
    }
    segments.insert(segments.end(), next.segments.begin(), next.segments.end());
    events.insert(events.end(), next.events.begin(), next.events.end());
    stats.steps += next.stats.steps;
    stats.rejected += next.stats.rejected;
    stats.newton_iterations += next.stats.newton_iterations;
    stats.residual_evals += next.stats.residual_evals;
    stats.jacobians += next.stats.jacobians;
    stats.elements += next.stats.elements;
  }

 private:
  void eval(double tau, double* value, double* slope) const {
    if (empty()) throw DomainError("empty trajectory");
    const double tol = 1e-12 * std::max(1.0, std::abs(back()));
    if (tau < front() - tol || tau > back() + tol) throw DomainError("time outside trajectory");
    if (segments.empty()) {
      // single sample: constant
      for (std::size_t c = 0; c < dim(); ++c) {
        if (value) value[c] = values.front()[c];
        if (slope) slope[c] = 0.0;
      }
      return;
    }
    auto it = std::lower_bound(segments.begin(), segments.end(), tau,
                               [](const DenseSegment& s, double x) { return s.t_hi < x; });
    if (it == segments.end()) --it;
    it->eval(kinds, tau, value, slope);
  }
};

}  // namespace stefan_oc::dae
