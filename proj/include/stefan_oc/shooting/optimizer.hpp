#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "stefan_oc/core/errors.hpp"

namespace stefan_oc::shooting {

struct BoxOptions {
  double opt_tol = 1e-7;  ///< projected-gradient inf-norm at convergence
  int max_iter = 200;
  int memory = 8;          ///< curvature pairs kept
  double armijo = 1e-4;
  int max_backtracks = 30;
  /// Stop when the objective fell by less than stall_rtol (relative) over
  /// the last stall_window iterations; 0 disables the test.
  int stall_window = 5;
  double stall_rtol = 1e-5;
};

struct BoxResult {
  std::vector<double> x;
  double f = INFINITY;
  std::vector<double> history;  ///< objective at every accepted iterate, starting point first
  int iterations = 0;
  std::size_t evaluations = 0;
  double projected_gradient = INFINITY;
  bool converged = false;
  std::string reason;
};

/// inf-norm of P(x - g) - x, the first-order measure for a box.
inline double projected_gradient_norm(const std::vector<double>& x, const std::vector<double>& g,
                                      const std::vector<double>& lo, const std::vector<double>& hi) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(std::clamp(x[i] - g[i], lo[i], hi[i]) - x[i]));
  return m;
}

/**
 * Projected quasi-Newton descent on a box. The L-BFGS direction is built on
 * the free variables (those not held at a bound by the gradient); the step
 * is a backtracking Armijo search along the projected path.
 *
 * Stops when the projected gradient drops to opt_tol (converged), when no
 * step along the projected path decreases f or f stalls over a window of
 * iterations (converged: stationary to the accuracy of the gradient), or at
 * max_iter (not converged).
 */
inline BoxResult projected_lbfgs(const std::function<double(const std::vector<double>&)>& f,
                                 const std::function<std::vector<double>(const std::vector<double>&, double)>& grad,
                                 std::vector<double> x, const std::vector<double>& lo,
                                 const std::vector<double>& hi, const BoxOptions& opt = {}) {
  const std::size_t n = x.size();
  if (lo.size() != n || hi.size() != n) throw ConfigError("bounds", "bound vectors must match the unknowns");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lo[i] <= hi[i])) throw ConfigError("bounds", "lower bound above upper bound");
    x[i] = std::clamp(x[i], lo[i], hi[i]);
  }

  BoxResult res;
  double fx = f(x);
  ++res.evaluations;
  std::vector<double> g = grad(x, fx);
  res.history.push_back(fx);

  std::deque<std::vector<double>> S, Y;
  std::deque<double> rho;
  std::vector<double> d(n), xt(n), step(n);

  auto free_var = [&](std::size_t i) {
    return !((x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0));
  };

  for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
    res.projected_gradient = projected_gradient_norm(x, g, lo, hi);
    if (res.projected_gradient <= opt.opt_tol) {
      res.converged = true;
      res.reason = "projected gradient below tolerance";
      break;
    }

    // two-loop recursion restricted to free variables
    std::vector<bool> fr(n);
    for (std::size_t i = 0; i < n; ++i) fr[i] = free_var(i);
    auto dot_free = [&](const std::vector<double>& a, const std::vector<double>& b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (fr[i]) s += a[i] * b[i];
      return s;
    };
    std::vector<double> q(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (fr[i]) q[i] = g[i];
    std::vector<double> alpha(S.size());
    for (std::size_t j = S.size(); j-- > 0;) {
      alpha[j] = rho[j] * dot_free(S[j], q);
      for (std::size_t i = 0; i < n; ++i)
        if (fr[i]) q[i] -= alpha[j] * Y[j][i];
    }
    if (!S.empty()) {
      const double yy = dot_free(Y.back(), Y.back());
      const double sy = dot_free(S.back(), Y.back());
      const double gamma = (yy > 0.0 && sy > 0.0) ? sy / yy : 1.0;
      for (double& v : q) v *= gamma;
    }
    for (std::size_t j = 0; j < S.size(); ++j) {
      const double beta = rho[j] * dot_free(Y[j], q);
      for (std::size_t i = 0; i < n; ++i)
        if (fr[i]) q[i] += (alpha[j] - beta) * S[j][i];
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = fr[i] ? -q[i] : 0.0;

    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += g[i] * d[i];
    if (!(slope < 0.0)) {
      // not a descent direction: fall back to projected steepest descent
      S.clear();
      Y.clear();
      rho.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = fr[i] ? -g[i] : 0.0;
    }
    double t = 1.0;
    if (S.empty()) {
      double dmax = 0.0;
      for (double v : d) dmax = std::max(dmax, std::abs(v));
      if (dmax > 0.0) t = std::min(1.0, 1.0 / dmax);
    }

    bool accepted = false;
    double f_new = fx;
    for (int k = 0; k < opt.max_backtracks; ++k) {
      double decrease = 0.0;
      bool moved = false;
      for (std::size_t i = 0; i < n; ++i) {
        xt[i] = std::clamp(x[i] + t * d[i], lo[i], hi[i]);
        step[i] = xt[i] - x[i];
        decrease += g[i] * step[i];
        moved = moved || step[i] != 0.0;
      }
      if (!moved) break;
      f_new = f(xt);
      ++res.evaluations;
      if (std::isfinite(f_new) && f_new <= fx + opt.armijo * decrease) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      res.converged = true;
      res.reason = "no decrease along the projected path (stationary to gradient accuracy)";
      break;
    }

    std::vector<double> g_new = grad(xt, f_new);
    std::vector<double> yv(n);
    double sy = 0.0, ss = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      yv[i] = g_new[i] - g[i];
      sy += step[i] * yv[i];
      ss += step[i] * step[i];
      yy += yv[i] * yv[i];
    }
    if (sy > 1e-12 * std::sqrt(ss * yy)) {
      S.push_back(step);
      Y.push_back(yv);
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > opt.memory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    x = xt;
    fx = f_new;
    g = std::move(g_new);
    res.history.push_back(fx);
    const auto w = static_cast<std::size_t>(opt.stall_window);
    if (w > 0 && res.history.size() > w) {
      const double before = res.history[res.history.size() - 1 - w];
      if (before - fx <= opt.stall_rtol * std::abs(before)) {
        ++res.iterations;
        res.projected_gradient = projected_gradient_norm(x, g, lo, hi);
        res.converged = true;
        res.reason = "objective stalled (stationary to gradient accuracy)";
        break;
      }
    }
  }
  if (res.iterations >= opt.max_iter && !res.converged) {
    res.projected_gradient = projected_gradient_norm(x, g, lo, hi);
    res.reason = "iteration limit reached";
  }
  res.x = std::move(x);
  res.f = fx;
  return res;
}

}  // namespace stefan_oc::shooting
