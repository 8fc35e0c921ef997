#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "stefan_oc/dae/system.hpp"
#include "stefan_oc/dae/trajectory.hpp"

namespace stefan_oc::dae {

inline double fd_step(double x) {
  return std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(x));
}

/**
 * Forward-difference partials dF/dy and dF/dy' at (tau, y, yp) given
 * f0 = F(tau, y, yp). For semi-explicit systems dF/dy' is the identity on
 * the differential variables and is not differenced.
 */
inline void fd_jacobians(const DaeSystem& sys, double tau, std::span<const double> y,
                         std::span<const double> yp, std::span<const double> f0,
                         Eigen::MatrixXd& fy, Eigen::MatrixXd& fyp, SolverStats& stats) {
  const std::size_t n = sys.dim;
  fy.resize(n, n);
  fyp.setZero(n, n);
  std::vector<double> yw(y.begin(), y.end());
  std::vector<double> ypw(yp.begin(), yp.end());
  std::vector<double> f(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double h = fd_step(y[j]);
    yw[j] = y[j] + h;
    sys.residual(tau, yw, ypw, f);
    yw[j] = y[j];
    for (std::size_t i = 0; i < n; ++i) fy(i, j) = (f[i] - f0[i]) / h;
  }
  stats.residual_evals += n;
  if (sys.semi_explicit) {
    for (std::size_t j = 0; j < n; ++j)
      if (!sys.is_algebraic(j)) fyp(j, j) = 1.0;
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      const double h = fd_step(yp[j]);
      ypw[j] = yp[j] + h;
      sys.residual(tau, yw, ypw, f);
      ypw[j] = yp[j];
      for (std::size_t i = 0; i < n; ++i) fyp(i, j) = (f[i] - f0[i]) / h;
    }
    stats.residual_evals += n;
  }
  ++stats.jacobians;
}

/// Weighted RMS norm with weights 1 / (rtol |ref| + atol).
inline double wrms(std::span<const double> v, std::span<const double> ref, double rtol, double atol) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = rtol * std::abs(ref[i]) + atol;
    const double r = v[i] / w;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(v.size()));
}

struct NewtonResult {
  bool converged = false;
  int iterations = 0;
  double residual = INFINITY;
};

/**
 * Damped Newton for a square system G(x) = 0 with a finite-difference
 * Jacobian, refreshed every iteration. Each step is halved until the residual
 * ∞-norm decreases (at most `max_halvings` times).
 */
template <class Fn>
NewtonResult damped_newton(Fn&& g, std::vector<double>& x, double tol, int max_iter,
                           double damping = 0.5, int max_halvings = 30) {
  const std::size_t n = x.size();
  std::vector<double> r(n), rt(n), xt(n);
  g(x, r);
  NewtonResult out;
  out.residual = inf_norm(r);
  Eigen::MatrixXd jac(n, n);
  for (int it = 0; it < max_iter; ++it) {
    if (out.residual <= tol) {
      out.converged = true;
      return out;
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double h = fd_step(x[j]);
      xt = x;
      xt[j] += h;
      g(xt, rt);
      for (std::size_t i = 0; i < n; ++i) jac(i, j) = (rt[i] - r[i]) / h;
    }
    Eigen::Map<Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd dx = jac.fullPivLu().solve(-rv);
    if (!dx.allFinite()) return out;
    double lam = 1.0;
    bool improved = false;
    for (int k = 0; k <= max_halvings; ++k) {
      for (std::size_t i = 0; i < n; ++i) xt[i] = x[i] + lam * dx[static_cast<Eigen::Index>(i)];
      try {
        g(xt, rt);
      } catch (const DomainError&) {
        lam *= damping;
        continue;
      }
      const double nr = inf_norm(rt);
      if (std::isfinite(nr) && nr < out.residual) {
        x = xt;
        r = rt;
        out.residual = nr;
        improved = true;
        break;
      }
      lam *= damping;
    }
    ++out.iterations;
    if (!improved) return out;
  }
  out.converged = out.residual <= tol;
  return out;
}

}  // namespace stefan_oc::dae
