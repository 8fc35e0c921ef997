#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "stefan_oc/core/errors.hpp"

namespace stefan_oc::dae {

namespace detail {
inline double legendre(int k, double x) {
  double p0 = 1.0, p1 = x;
  if (k == 0) return p0;
  for (int j = 2; j <= k; ++j) {
    const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}
}  // namespace detail

/**
 * Radau IIA collocation points on (0, 1], right endpoint included, in
 * increasing order.
 */
inline std::vector<double> radau_points(int m) {
  if (m < 1 || m > 12) throw ConfigError("nodes", "unsupported collocation point count");
  // roots of P_m + P_{m-1} are the left-Radau points (x = -1 included); reflect them
  auto f = [m](double x) { return detail::legendre(m, x) + detail::legendre(m - 1, x); };
  std::vector<double> roots;
  const int scan = 4000;
  double xa = -1.0 + 1e-14;
  double fa = f(xa);
  roots.push_back(-1.0);
  for (int k = 1; k <= scan; ++k) {
    const double xb = -1.0 + 2.0 * k / scan;
    const double fb = f(xb);
    if (fa * fb < 0.0) {
      double lo = xa, hi = xb, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    xa = xb;
    fa = fb;
  }
  if (roots.size() != static_cast<std::size_t>(m)) throw Error("radau root scan failed");
  std::vector<double> c;
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) c.push_back((1.0 - *it) / 2.0);
  return c;
}

/**
 * Differentiation matrix of the Lagrange basis on nodes `x`: D[k][j] is
 * l_j'(x_k).
 */
inline std::vector<std::vector<double>> lagrange_diff_matrix(const std::vector<double>& x) {
  const std::size_t m = x.size();
  std::vector<double> w(m, 1.0);  // barycentric weights
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < m; ++k)
      if (k != j) w[j] /= (x[j] - x[k]);
  std::vector<std::vector<double>> d(m, std::vector<double>(m, 0.0));
  for (std::size_t k = 0; k < m; ++k) {
    double diag = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == k) continue;
      d[k][j] = (w[j] / w[k]) / (x[k] - x[j]);
      diag -= d[k][j];
    }
    d[k][k] = diag;
  }
  return d;
}

}  // namespace stefan_oc::dae
