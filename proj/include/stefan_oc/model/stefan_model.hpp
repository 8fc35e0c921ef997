#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "stefan_oc/core/errors.hpp"
#include "stefan_oc/model/params.hpp"

namespace stefan_oc::model {

/**
 * Node values of the discretized model.
 *
 * theta1[i] is the solid temperature at u = i/n, i = 0..n-1; theta2[j-1] the
 * liquid temperature at v = j/n, j = 1..n. The interface nodes (u = 1 and
 * v = 0) are pinned at the melting point and not stored.
 */
struct StefanState {
  std::vector<double> theta1;
  std::vector<double> theta2;
  double s = 1.0;
};

struct StateDerivative {
  std::vector<double> dtheta1;
  std::vector<double> dtheta2;
  double ds = 0.0;
};

/// How the average liquid temperature is formed.
struct AverageOptions {
  bool include_wall = true;    ///< count the heated-wall node
  bool area_weighted = false;  ///< weight nodes by radius (cross-section average)
};

/**
 * Front-fixing finite-difference model of cylindrical melting.
 *
 * Solid core r in [0, s] is mapped to u = r/s, the liquid annulus [s, 1] to
 * v = (r - s)/(1 - s); both carry n+1 uniform nodes. Flat state layout used by
 * the solvers: [theta1 (n), theta2 (n), s].
 */
class StefanModel {
 public:
  explicit StefanModel(ModelParams params) : p_(params) {
    p_.validate();
    h_ = 1.0 / static_cast<double>(p_.n);
    solid_nodes_.resize(p_.n + 1);
    liquid_nodes_.resize(p_.n + 1);
    for (std::size_t i = 0; i <= p_.n; ++i) {
      solid_nodes_[i] = static_cast<double>(i) * h_;
      liquid_nodes_[i] = static_cast<double>(i) * h_;
    }
    solid_nodes_.back() = 1.0;
    liquid_nodes_.back() = 1.0;
  }

  const ModelParams& params() const { return p_; }
  std::size_t n() const { return p_.n; }
  std::size_t state_size() const { return 2 * p_.n + 1; }
  std::size_t s_index() const { return 2 * p_.n; }
  std::span<const double> solid_nodes() const { return solid_nodes_; }
  std::span<const double> liquid_nodes() const { return liquid_nodes_; }
  double s_start() const { return 1.0 - p_.eps_front; }
  double s_stop() const { return p_.eps_front; }

  /**
   * Hot-path right-hand side on the flat layout. Only requires 0 < s < 1, so
   * Newton trial points slightly past the stop event stay evaluable.
   */
  void evaluate(std::span<const double> y, double theta_b, std::span<double> dy) const {
    const std::size_t n = p_.n;
    const double s = y[2 * n];
    if (!(s > 0.0 && s < 1.0)) throw DomainError("interface position outside (0, 1)");
    const double h = h_;
    const double inv_h2 = 1.0 / (h * h);
    const double* t1 = y.data();
    const double* t2 = y.data() + n;  // t2[j-1] is liquid node j

    auto solid = [&](std::size_t i) { return i < n ? t1[i] : 0.0; };
    auto liquid = [&](std::size_t j) { return j == 0 ? 0.0 : t2[j - 1]; };

    // one-sided second-order gradients at the interface, in r
    const double grad_solid = (3.0 * solid(n) - 4.0 * solid(n - 1) + solid(n - 2)) / (2.0 * h) / s;
    const double grad_liquid =
        (-3.0 * liquid(0) + 4.0 * liquid(1) - liquid(2)) / (2.0 * h) / (1.0 - s);
    const double sdot = p_.stefan_number * (grad_solid - p_.k_ratio * grad_liquid);
    dy[2 * n] = sdot;

    const double inv_s2 = 1.0 / (s * s);
    // symmetry at r = 0: (1/r) dT/dr -> d2T/dr2
    dy[0] = 4.0 * (solid(1) - solid(0)) * inv_h2 * inv_s2;
    for (std::size_t i = 1; i < n; ++i) {
      const double u = solid_nodes_[i];
      const double tu = (solid(i + 1) - solid(i - 1)) / (2.0 * h);
      const double tuu = (solid(i + 1) - 2.0 * solid(i) + solid(i - 1)) * inv_h2;
      dy[i] = (tuu + tu / u) * inv_s2 + (u / s) * sdot * tu;
    }

    const double one_m_s = 1.0 - s;
    const double a2 = p_.alpha_ratio;
    const double ghost =
        liquid(n - 1) + 2.0 * h * one_m_s * p_.wall_coefficient() * (theta_b - liquid(n));
    for (std::size_t j = 1; j <= n; ++j) {
      const double v = liquid_nodes_[j];
      const double r = s + v * one_m_s;
      const double up = j < n ? liquid(j + 1) : ghost;
      const double tv = (up - liquid(j - 1)) / (2.0 * h);
      const double tvv = (up - 2.0 * liquid(j) + liquid(j - 1)) * inv_h2;
      dy[n + j - 1] = a2 * (tvv / (one_m_s * one_m_s) + tv / (r * one_m_s)) +
                      ((1.0 - v) / one_m_s) * sdot * tv;
    }
  }

  /// Checked right-hand side on a structured state.
  StateDerivative rhs(const StefanState& state, double theta_b) const {
    check_state(state);
    if (!std::isfinite(theta_b)) throw DomainError("heater temperature is not finite");
    const auto y = pack(state);
    std::vector<double> dy(state_size());
    evaluate(y, theta_b, dy);
    StateDerivative d;
    d.dtheta1.assign(dy.begin(), dy.begin() + static_cast<std::ptrdiff_t>(p_.n));
    d.dtheta2.assign(dy.begin() + static_cast<std::ptrdiff_t>(p_.n),
                     dy.begin() + static_cast<std::ptrdiff_t>(2 * p_.n));
    d.ds = dy[2 * p_.n];
    return d;
  }

  std::vector<double> pack(const StefanState& state) const {
    std::vector<double> y;
    y.reserve(state_size());
    y.insert(y.end(), state.theta1.begin(), state.theta1.end());
    y.insert(y.end(), state.theta2.begin(), state.theta2.end());
    y.push_back(state.s);
    return y;
  }

  StefanState unpack(std::span<const double> y) const {
    StefanState st;
    st.theta1.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(p_.n));
    st.theta2.assign(y.begin() + static_cast<std::ptrdiff_t>(p_.n),
                     y.begin() + static_cast<std::ptrdiff_t>(2 * p_.n));
    st.s = y[2 * p_.n];
    return st;
  }

  /// Node weights of the liquid average; they sum to one.
  std::vector<double> average_weights(double s, const AverageOptions& opt = {}) const {
    const std::size_t n = p_.n;
    std::vector<double> w(n, 0.0);
    const std::size_t count = opt.include_wall ? n : n - 1;
    if (!opt.area_weighted) {
      for (std::size_t j = 0; j < count; ++j) w[j] = 1.0 / static_cast<double>(count);
      return w;
    }
    // trapezoid on r dr over the annulus; the pinned interface node carries zero temperature
    double total = 0.0;
    for (std::size_t j = 1; j <= count; ++j) {
      const double r = s + liquid_nodes_[j] * (1.0 - s);
      const double trap = (j == n) ? 0.5 : 1.0;
      w[j - 1] = r * trap;
      total += w[j - 1];
    }
    for (auto& x : w) x /= total;
    return w;
  }

  /// Average liquid temperature (unweighted node mean by default).
  double average_temperature(std::span<const double> y, const AverageOptions& opt = {}) const {
    const auto w = average_weights(y[2 * p_.n], opt);
    double acc = 0.0;
    for (std::size_t j = 0; j < p_.n; ++j) acc += w[j] * y[p_.n + j];
    return acc;
  }

  double average_temperature(const StefanState& state, const AverageOptions& opt = {}) const {
    return average_temperature(pack(state), opt);
  }

  /// Rate of the average temperature given the node rates `dy`.
  double average_rate(std::span<const double> y, std::span<const double> dy,
                      const AverageOptions& opt = {}) const {
    const std::size_t n = p_.n;
    const double s = y[2 * n];
    if (!opt.area_weighted) {
      const std::size_t count = opt.include_wall ? n : n - 1;
      double acc = 0.0;
      for (std::size_t j = 0; j < count; ++j) acc += dy[n + j];
      return acc / static_cast<double>(count);
    }
    // radial weights move with the front: add (dw/ds) * ds/dtau
    const auto w = average_weights(s, opt);
    const double ds = 1e-7;
    const auto wp = average_weights(s + ds, opt);
    const auto wm = average_weights(s - ds, opt);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      acc += w[j] * dy[n + j] + (wp[j] - wm[j]) / (2.0 * ds) * dy[2 * n] * y[n + j];
    return acc;
  }

  /**
   * Initial state: a melt layer of thickness eps_front at the wall holding the
   * quasi-steady logarithmic profile for heater temperature `theta_b`; solid at
   * the melting point.
   */
  std::vector<double> initial_state(double theta_b) const {
    const std::size_t n = p_.n;
    std::vector<double> y(state_size(), 0.0);
    const double s = s_start();
    const double amp = p_.biot * theta_b / (p_.wall_ratio + p_.biot * std::log(1.0 / s));
    for (std::size_t j = 1; j <= n; ++j) {
      const double r = s + liquid_nodes_[j] * (1.0 - s);
      y[n + j - 1] = amp * std::log(r / s);
    }
    y[2 * n] = s;
    return y;
  }

 private:
  void check_state(const StefanState& st) const {
    if (st.theta1.size() != p_.n || st.theta2.size() != p_.n)
      throw DomainError("state arrays must hold n node values");
    const double tol = 1e-12;
    if (!(st.s >= p_.eps_front - tol && st.s <= 1.0 - p_.eps_front + tol))
      throw DomainError("interface position outside [eps_front, 1 - eps_front]");
  }

  ModelParams p_;
  double h_ = 0.0;
  std::vector<double> solid_nodes_;
  std::vector<double> liquid_nodes_;
};

inline StefanModel make_model(const ModelParams& params) { return StefanModel(params); }

}  // namespace stefan_oc::model
