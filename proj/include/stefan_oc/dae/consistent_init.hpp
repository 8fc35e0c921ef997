#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "stefan_oc/core/errors.hpp"
#include "stefan_oc/dae/newton.hpp"
#include "stefan_oc/dae/system.hpp"

namespace stefan_oc::dae {

struct InitOptions {
  double init_tol = 1e-10;
  int max_iter = 50;
  /// Optional hook that rewrites the differential part of y after the
  /// algebraic unknowns change (initial data that depends on the control).
  std::function<void(std::span<double> y)> coupling;
};

struct InitResult {
  std::vector<double> y;
  std::vector<double> yp;
  bool feasible = true;        ///< root found inside the bounds
  long clipped_var = -1;       ///< algebraic variable held at a bound when infeasible
  double clipped_at = 0.0;     ///< the bound it was clipped to
  double residual = 0.0;       ///< ‖F‖∞ at the returned point
};

namespace detail {

inline std::vector<std::size_t> algebraic_indices(const DaeSystem& sys) {
  std::vector<std::size_t> a;
  for (std::size_t i = 0; i < sys.dim; ++i)
    if (sys.is_algebraic(i)) a.push_back(i);
  return a;
}

/// Solve the differential rows for y' with y held fixed; algebraic y' set to zero.
inline std::vector<double> solve_slopes(const DaeSystem& sys, double tau, std::span<const double> y,
                                        double tol, int max_iter) {
  std::vector<double> yp(sys.dim, 0.0);
  std::vector<std::size_t> d;
  for (std::size_t i = 0; i < sys.dim; ++i)
    if (!sys.is_algebraic(i)) d.push_back(i);
  if (d.empty()) return yp;
  std::vector<double> r(sys.dim);
  if (sys.semi_explicit) {
    // F_i = y'_i - f_i, linear with unit slope
    sys.residual(tau, y, yp, r);
    for (auto i : d) yp[i] = -r[i];
    return yp;
  }
  std::vector<double> x(d.size(), 0.0);
  auto g = [&](const std::vector<double>& z, std::vector<double>& out) {
    std::vector<double> ypt(sys.dim, 0.0);
    for (std::size_t k = 0; k < d.size(); ++k) ypt[d[k]] = z[k];
    sys.residual(tau, y, ypt, r);
    out.resize(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) out[k] = r[d[k]];
  };
  damped_newton(g, x, tol, max_iter);
  for (std::size_t k = 0; k < d.size(); ++k) yp[d[k]] = x[k];
  return yp;
}

}  // namespace detail

/**
 * Make (y, y') consistent at tau0. Differential components of `y_partial`
 * are kept (up to the coupling hook); algebraic components are solved from
 * the algebraic rows, which requires a semi-explicit row layout.
 *
 * A root outside the variable's bounds is not an exception: the result comes
 * back infeasible with the variable clipped to the nearer bound.
 */
inline InitResult consistent_init(const DaeSystem& sys, double tau0, std::vector<double> y_partial,
                                  const InitOptions& opt = {}) {
  sys.validate();
  if (y_partial.size() != sys.dim) throw DomainError("initial vector has wrong length");
  const auto alg = detail::algebraic_indices(sys);
  if (!alg.empty() && !sys.semi_explicit)
    throw ConfigError("semi_explicit", "consistent initialization needs aligned algebraic rows");

  InitResult out;
  std::vector<double> y = y_partial;
  std::vector<double> zero(sys.dim, 0.0);
  std::vector<double> r(sys.dim);

  auto apply = [&](const std::vector<double>& z) {
    for (std::size_t k = 0; k < alg.size(); ++k) y[alg[k]] = z[k];
    if (opt.coupling) opt.coupling(y);
  };
  auto g = [&](const std::vector<double>& z, std::vector<double>& res) {
    apply(z);
    sys.residual(tau0, y, zero, r);
    res.resize(alg.size());
    for (std::size_t k = 0; k < alg.size(); ++k) res[k] = r[alg[k]];
  };

  if (!alg.empty()) {
    std::vector<double> z(alg.size());
    for (std::size_t k = 0; k < alg.size(); ++k) z[k] = y_partial[alg[k]];
    auto nr = damped_newton(g, z, opt.init_tol, opt.max_iter);

    const bool scalar = alg.size() == 1;
    const std::optional<Bounds> bnd =
        sys.bounds.empty() ? std::nullopt : sys.bounds[alg.front()];

    if (!nr.converged && scalar && bnd && std::isfinite(bnd->lo) && std::isfinite(bnd->hi)) {
      // monotone scalar fallback: bisection over the bound interval
      std::vector<double> rv;
      auto scalar_res = [&](double v) {
        g(std::vector<double>{v}, rv);
        return rv[0];
      };
      double lo = bnd->lo, hi = bnd->hi;
      double flo = scalar_res(lo), fhi = scalar_res(hi);
      if (flo == 0.0) {
        z[0] = lo;
        nr.converged = true;
      } else if (fhi == 0.0) {
        z[0] = hi;
        nr.converged = true;
      } else if ((flo < 0.0) != (fhi < 0.0)) {
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = scalar_res(mid);
          if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        z[0] = 0.5 * (lo + hi);
        nr.converged = true;
      } else {
        z[0] = std::abs(flo) <= std::abs(fhi) ? lo : hi;
        out.feasible = false;
      }
    }

    // root outside the box: clip the offending variable
    if (!sys.bounds.empty()) {
      for (std::size_t k = 0; k < alg.size(); ++k) {
        const auto& b = sys.bounds[alg[k]];
        if (!b) continue;
        if (z[k] < b->lo || z[k] > b->hi) {
          z[k] = std::clamp(z[k], b->lo, b->hi);
          out.feasible = false;
        }
        if (!out.feasible && out.clipped_var < 0 && (z[k] == b->lo || z[k] == b->hi)) {
          out.clipped_var = static_cast<long>(alg[k]);
          out.clipped_at = z[k];
        }
      }
    }
    apply(z);
    if (out.feasible && !nr.converged) {
      std::vector<double> res;
      g(z, res);
      throw InitializationError("algebraic equations have no root from the given guess", inf_norm(res));
    }
  } else if (opt.coupling) {
    opt.coupling(y);
  }

  out.yp = detail::solve_slopes(sys, tau0, y, opt.init_tol, opt.max_iter);
  sys.residual(tau0, y, out.yp, r);
  out.residual = inf_norm(r);
  out.y = std::move(y);
  if (out.feasible && out.residual > opt.init_tol)
    throw InitializationError("could not reach a consistent initial point", out.residual);
  return out;
}

}  // namespace stefan_oc::dae
