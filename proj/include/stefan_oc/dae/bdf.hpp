#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stefan_oc/core/errors.hpp"
#include "stefan_oc/dae/consistent_init.hpp"
#include "stefan_oc/dae/newton.hpp"
#include "stefan_oc/dae/system.hpp"
#include "stefan_oc/dae/trajectory.hpp"

namespace stefan_oc::dae {

struct BdfOptions {
  double rtol = 1e-8;
  double atol = 1e-8;
  double newton_tol = 1e-8;  ///< ‖F‖∞ required at every accepted step
  double init_tol = 1e-8;    ///< consistency check on y0
  double h_init = 0.0;       ///< 0: automatic
  double h_max = INFINITY;
  int max_order = 5;
  int max_newton = 8;
  int jacobian_age = 20;  ///< steps a Jacobian may be reused
  std::size_t max_steps = 1000000;
  double event_tol = 1e-12;

  static BdfOptions with_tol(double tol) {
    BdfOptions o;
    o.rtol = tol;
    o.atol = tol;
    return o;
  }
};

/// Integrator state on arrival at a breakpoint, before the restart.
struct BdfCheckpoint {
  double t = 0.0;
  std::vector<double> y;
  double h = 0.0;
  std::size_t samples = 0;
  std::size_t segments = 0;
  SolverStats stats;
};

namespace detail {

/// Lagrange extrapolation of the first `count` history points to x.
inline void extrapolate(const std::deque<double>& ht, const std::deque<std::vector<double>>& hy,
                        std::size_t count, double x, std::vector<double>& out) {
  const std::size_t dim = hy.front().size();
  out.assign(dim, 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    double lk = 1.0;
    for (std::size_t j = 0; j < count; ++j)
      if (j != k) lk *= (x - ht[j]) / (ht[k] - ht[j]);
    for (std::size_t c = 0; c < dim; ++c) out[c] += lk * hy[k][c];
  }
}

class BdfIntegrator {
 public:
  BdfIntegrator(const DaeSystem& sys, BdfOptions opt) : sys_(sys), opt_(opt), n_(sys.dim) {}

  Trajectory run(std::vector<double> y0, double t0, double t1, std::vector<BdfCheckpoint>* record = nullptr) {
    check(y0, t0, t1);
    traj_ = Trajectory{};
    traj_.kinds = sys_.kinds;
    yp0_ = initial_slopes(t0, y0);
    traj_.push_sample(t0, y0, yp0_, true);

    ht_.assign(1, t0);
    hy_.assign(1, y0);
    g_prev_.resize(sys_.stop_events.size());
    for (std::size_t e = 0; e < g_prev_.size(); ++e) g_prev_[e] = sys_.stop_events[e].fn(t0, y0);

    h_ = opt_.h_init > 0.0 ? opt_.h_init : initial_step(t0, t1, y0);
    k_ = 1;
    at_order_ = 0;
    jac_valid_ = false;
    return march(t0, t1, record);
  }

  /// Continue `base` from one of its checkpoints; identical to a full run
  /// when the system agrees with the one that produced `base` up to cp.t.
  Trajectory resume(const Trajectory& base, const BdfCheckpoint& cp, double t0, double t1,
                    std::vector<BdfCheckpoint>* record = nullptr) {
    check(cp.y, t0, t1);
    if (cp.samples > base.size() || cp.segments > base.segments.size())
      throw ConfigError("checkpoint", "checkpoint does not belong to the trajectory");
    traj_ = Trajectory{};
    traj_.kinds = base.kinds;
    traj_.taus.assign(base.taus.begin(), base.taus.begin() + static_cast<std::ptrdiff_t>(cp.samples));
    traj_.values.assign(base.values.begin(), base.values.begin() + static_cast<std::ptrdiff_t>(cp.samples));
    traj_.slopes.assign(base.slopes.begin(), base.slopes.begin() + static_cast<std::ptrdiff_t>(cp.samples));
    traj_.enforced.assign(base.enforced.begin(), base.enforced.begin() + static_cast<std::ptrdiff_t>(cp.samples));
    traj_.segments.assign(base.segments.begin(), base.segments.begin() + static_cast<std::ptrdiff_t>(cp.segments));
    traj_.stats = cp.stats;
    g_prev_.resize(sys_.stop_events.size());
    ht_.assign(1, cp.t);
    hy_.assign(1, cp.y);
    h_ = cp.h;
    error_fails_ = 0;
    h_floor_ = 1e-14 * std::max(1.0, std::abs(t1));
    restart_after_breakpoint(cp.t);
    return march(cp.t, t1, record);
  }

 private:
  void check(const std::vector<double>& y0, double t0, double t1) const {
    sys_.validate();
    if (sys_.index_hint != 1) throw ConfigError("index_hint", "BDF integration needs an index-1 system");
    if (!(t1 > t0)) throw ConfigError("span", "empty integration interval");
    if (y0.size() != n_) throw DomainError("initial vector has wrong length");
  }

  Trajectory march(double t_from, double t1, std::vector<BdfCheckpoint>* record) {
    std::vector<double> stops;
    for (double b : sys_.breakpoints)
      if (b > t_from && b < t1) stops.push_back(b);
    std::sort(stops.begin(), stops.end());
    stops.push_back(t1);
    std::size_t next_stop = 0;
    h_floor_ = 1e-14 * std::max(1.0, std::abs(t1));

    while (true) {
      const double target = stops[next_stop];
      const double t = ht_.front();
      if (traj_.stats.steps >= opt_.max_steps)
        throw IntegrationFailure("step budget exhausted", t, hy_.front());
      double h = std::min({h_, opt_.h_max, target - t});
      if (t + 1.05 * h >= target) h = target - t;  // avoid a sliver before the target

      std::vector<double> y, yp;
      double est = 0.0;
      if (!attempt(h, y, yp, est)) continue;  // h_ was reduced, retry

      const double t_new = (h == target - t) ? target : t + h;
      accept(t_new, y, yp);

      if (locate_event()) return std::move(traj_);

      if (t_new == target) {
        if (next_stop + 1 == stops.size()) return std::move(traj_);
        ++next_stop;
        if (record)
          record->push_back({t_new, hy_.front(), h_, traj_.size(), traj_.segments.size(), traj_.stats});
        restart_after_breakpoint(t_new);
      } else {
        choose_next(h, est);
      }
    }
  }

  std::vector<double> initial_slopes(double t0, std::vector<double>& y0) {
    std::vector<double> r(n_);
    std::vector<double> zero(n_, 0.0);
    sys_.residual(t0, y0, zero, r);
    for (std::size_t i = 0; i < n_; ++i) {
      if (sys_.is_algebraic(i) && std::abs(r[i]) > opt_.init_tol && sys_.semi_explicit)
        throw InitializationError("initial point violates the algebraic equations", std::abs(r[i]));
    }
    auto yp = detail::solve_slopes(sys_, t0, y0, opt_.init_tol, 50);
    sys_.residual(t0, y0, yp, r);
    const double res = inf_norm(r);
    if (!(res <= opt_.init_tol)) throw InitializationError("inconsistent initial point", res);
    return yp;
  }

  double initial_step(double t0, double t1, std::span<const double> y0) const {
    double h = 1e-3 * (t1 - t0);
    // limit the relative change of y over the first step to about 1%
    const double d0 = std::max(wrms(y0, y0, opt_.rtol, opt_.atol), 1e-2 / opt_.rtol);
    const double d1 = wrms(yp0_, y0, opt_.rtol, opt_.atol);
    if (d1 * h > 0.01 * d0) h = 0.01 * d0 / d1;
    return std::max(h, 1e-12 * std::max(1.0, std::abs(t1)));
  }

  double norm(std::span<const double> v) const { return wrms(v, hy_.front(), opt_.rtol, opt_.atol); }

  void refresh_jacobian(double t, std::span<const double> y, std::span<const double> yp) {
    std::vector<double> f0(n_);
    sys_.residual(t, y, yp, f0);
    ++traj_.stats.residual_evals;
    fd_jacobians(sys_, t, y, yp, f0, fy_, fyp_, traj_.stats);
    jac_age_ = 0;
    jac_valid_ = true;
    lu_a0_ = std::numeric_limits<double>::quiet_NaN();
  }

  void factor(double a0) {
    lu_.compute(fy_ + a0 * fyp_);
    lu_a0_ = a0;
  }

  // error estimate of order q at the candidate point: scaled distance to the
  // extrapolant through q + 1 history points (confluent start when history is short)
  double estimate(std::size_t q, double t_new, const std::vector<double>& y, double h) {
    std::vector<double> pred, diff(n_);
    if (ht_.size() >= q + 1) {
      extrapolate(ht_, hy_, q + 1, t_new, pred);
      for (std::size_t c = 0; c < n_; ++c) diff[c] = y[c] - pred[c];
      return h / (t_new - ht_[q]) * norm(diff);
    }
    for (std::size_t c = 0; c < n_; ++c) diff[c] = y[c] - (hy_.front()[c] + h * yp0_[c]);
    return norm(diff);
  }

  /// One step of size h at order k_. On failure adjusts h_ / k_ and returns false.
  bool attempt(double h, std::vector<double>& y, std::vector<double>& yp, double& est) {
    const double t = ht_.front();
    const double t_new = t + h;
    const std::size_t k = std::min<std::size_t>(k_, ht_.size());
    h_try_ = h;

    // derivative weights at t_new over nodes t_new, t_n, ..., t_{n-k+1}
    std::vector<double> nodes(k + 1);
    nodes[0] = t_new;
    for (std::size_t j = 0; j < k; ++j) nodes[j + 1] = ht_[j];
    std::vector<double> a(k + 1, 0.0);
    for (std::size_t j = 0; j <= k; ++j) {
      if (j == 0) {
        for (std::size_t m = 1; m <= k; ++m) a[0] += 1.0 / (t_new - nodes[m]);
      } else {
        double w = 1.0 / (nodes[j] - nodes[0]);
        for (std::size_t m = 1; m <= k; ++m)
          if (m != j) w *= (nodes[0] - nodes[m]) / (nodes[j] - nodes[m]);
        a[j] = w;
      }
    }
    std::vector<double> beta(n_, 0.0);
    for (std::size_t j = 1; j <= k; ++j)
      for (std::size_t c = 0; c < n_; ++c) beta[c] += a[j] * hy_[j - 1][c];

    std::vector<double> pred;
    if (ht_.size() >= k + 1) {
      extrapolate(ht_, hy_, k + 1, t_new, pred);
    } else {
      pred.resize(n_);
      for (std::size_t c = 0; c < n_; ++c) pred[c] = hy_.front()[c] + h * yp0_[c];
    }

    y = pred;
    yp.assign(n_, 0.0);
    std::vector<double> f(n_);
    const double a0 = a[0];
    bool fresh = false;
    if (!jac_valid_ || jac_age_ >= opt_.jacobian_age) {
      for (std::size_t c = 0; c < n_; ++c) yp[c] = a0 * y[c] + beta[c];
      if (!safe_residual(t_new, y, yp, f)) return newton_failed(true);
      refresh_jacobian(t_new, y, yp);
      fresh = true;
    }
    if (!(std::abs(a0 - lu_a0_) <= 0.2 * std::abs(a0))) factor(a0);

    bool corr_ok = false;
    double dn_prev = 0.0;
    bool converged = false;
    for (int it = 0; it <= opt_.max_newton; ++it) {
      for (std::size_t c = 0; c < n_; ++c) yp[c] = a0 * y[c] + beta[c];
      if (!safe_residual(t_new, y, yp, f)) return newton_failed(fresh);
      const double rn = inf_norm(f);
      // a0 * y cannot be resolved below a few ulps: that bounds the attainable residual
      const double floor = 16.0 * std::numeric_limits<double>::epsilon() *
                           (std::abs(a0) * inf_norm(y) + inf_norm(yp));
      if (corr_ok && rn <= std::max(opt_.newton_tol, floor)) {
        converged = true;
        break;
      }
      if (it == opt_.max_newton) break;
      Eigen::Map<Eigen::VectorXd> fv(f.data(), static_cast<Eigen::Index>(n_));
      // iteration matrix uses lu_a0_; rescale the correction when a0 drifted (DASSL-style)
      Eigen::VectorXd dx = lu_.solve(-fv);
      if (lu_a0_ != a0) dx *= 2.0 / (1.0 + a0 / lu_a0_);
      if (!dx.allFinite()) return newton_failed(fresh);
      ++traj_.stats.newton_iterations;
      for (std::size_t c = 0; c < n_; ++c) y[c] += dx[static_cast<Eigen::Index>(c)];
      const double dn = norm(std::span<const double>(dx.data(), n_));
      if (it == 0) {
        corr_ok = dn <= 0.05;
      } else {
        const double rate = dn / std::max(dn_prev, 1e-300);
        if (rate > 0.9 && dn > 1e-3) return newton_failed(fresh);
        corr_ok = rate < 1.0 && dn * rate / (1.0 - rate) <= 0.33;
      }
      if (dn <= 1e-6) corr_ok = true;
      dn_prev = dn;
    }
    if (!converged) return newton_failed(fresh);

    est = estimate(k, t_new, y, h);
    if (est > 1.0) {
      ++traj_.stats.rejected;
      ++error_fails_;
      double r = 0.9 * std::pow(est, -1.0 / static_cast<double>(k + 1));
      r = std::clamp(r, 0.25, 0.9);
      if (error_fails_ >= 3) {
        k_ = 1;
        at_order_ = 0;
        r = 0.25;
      } else if (k_ > 1 && ht_.size() >= k) {
        const double lower = estimate(k - 1, t_new, y, h);
        if (lower <= est) {
          --k_;
          at_order_ = 0;
        }
      }
      shrink(h * r);
      return false;
    }
    error_fails_ = 0;
    ++jac_age_;
    return true;
  }

  bool safe_residual(double t, std::span<const double> y, std::span<const double> yp, std::span<double> f) {
    try {
      sys_.residual(t, y, yp, f);
    } catch (const DomainError&) {
      return false;
    }
    ++traj_.stats.residual_evals;
    for (double v : f)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool newton_failed(bool was_fresh) {
    ++traj_.stats.rejected;
    if (!was_fresh) {
      jac_valid_ = false;  // retry same step with a fresh Jacobian
      return false;
    }
    shrink(0.25 * h_try_);
    return false;
  }

  void shrink(double h) {
    if (h < h_floor_) throw IntegrationFailure("step size fell below the floor", ht_.front(), hy_.front());
    h_ = h;
    // the cached Jacobian stays; the iteration matrix is refactored for the new a0
  }

  void accept(double t_new, const std::vector<double>& y, const std::vector<double>& yp) {
    const std::size_t k = std::min<std::size_t>(k_, ht_.size());
    DenseSegment seg;
    seg.t_lo = ht_.front();
    seg.t_hi = t_new;
    seg.t.push_back(t_new);
    seg.y.push_back(y);
    for (std::size_t j = 0; j < k; ++j) {
      seg.t.push_back(ht_[j]);
      seg.y.push_back(hy_[j]);
    }
    if (ht_.size() == 1 && k == 1) {
      // first step after a (re)start: quadratic through y_n, y'_n and y_{n+1}
      seg = hermite_start(ht_.front(), hy_.front(), t_new, y);
    }
    traj_.segments.push_back(std::move(seg));
    traj_.push_sample(t_new, y, yp, true);
    ++traj_.stats.steps;
    ++at_order_;
    ht_.push_front(t_new);
    hy_.push_front(y);
    while (ht_.size() > static_cast<std::size_t>(opt_.max_order) + 2) {
      ht_.pop_back();
      hy_.pop_back();
    }
  }

  DenseSegment hermite_start(double ta, const std::vector<double>& ya, double tb,
                             const std::vector<double>& yb) const {
    // represent the quadratic by its values at ta, the midpoint and tb
    const double h = tb - ta;
    const double tm = ta + 0.5 * h;
    std::vector<double> ym(n_);
    for (std::size_t c = 0; c < n_; ++c) {
      // q(t) = ya + yp0 (t-ta) + ((yb - ya - yp0 h)/h^2) (t-ta)^2
      const double curv = (yb[c] - ya[c] - yp0_[c] * h) / (h * h);
      ym[c] = ya[c] + yp0_[c] * 0.5 * h + curv * 0.25 * h * h;
    }
    DenseSegment seg;
    seg.t_lo = ta;
    seg.t_hi = tb;
    seg.t = {ta, tm, tb};
    seg.y = {ya, ym, yb};
    return seg;
  }

  /// Truncate at the earliest stop-event crossing inside the last step.
  bool locate_event() {
    const auto& events = sys_.stop_events;
    if (events.empty()) return false;
    const double t_new = ht_.front();
    const auto& y_new = hy_.front();
    const DenseSegment& seg = traj_.segments.back();
    double best_t = INFINITY;
    std::size_t best_e = 0;
    std::vector<double> g_new(events.size());
    std::vector<double> yv(n_);
    for (std::size_t e = 0; e < events.size(); ++e) {
      g_new[e] = events[e].fn(t_new, y_new);
      if (!crossed(events[e].direction, g_prev_[e], g_new[e])) continue;
      double lo = seg.t_lo, hi = seg.t_hi;
      const double glo = g_prev_[e];
      while (hi - lo > opt_.event_tol * std::max(1.0, std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        seg.eval(sys_.kinds, mid, yv.data(), nullptr);
        const double gm = events[e].fn(mid, yv);
        if ((gm < 0.0) == (glo < 0.0) && gm != 0.0) lo = mid;
        else hi = mid;
      }
      if (hi < best_t) {
        best_t = hi;
        best_e = e;
      }
    }
    if (!std::isfinite(best_t)) {
      g_prev_ = g_new;
      return false;
    }

    // redo the step so that it lands on the event time
    const double t_prev = seg.t_lo;
    const double h = best_t - t_prev;
    std::vector<double> y_evt(n_), yp_evt(n_);
    seg.eval(sys_.kinds, best_t, y_evt.data(), yp_evt.data());
    bool enforced = false;
    if (h > 1e-13 * std::max(1.0, std::abs(best_t)) && best_t < t_new) {
      Trajectory saved;
      saved.push_sample(traj_.taus.back(), traj_.values.back(), traj_.slopes.back(),
                        traj_.enforced.back() != 0);
      DenseSegment saved_seg = traj_.segments.back();
      traj_.taus.pop_back();
      traj_.values.pop_back();
      traj_.slopes.pop_back();
      traj_.enforced.pop_back();
      traj_.segments.pop_back();
      --traj_.stats.steps;
      --at_order_;
      ht_.pop_front();
      hy_.pop_front();
      std::vector<double> y, yp;
      double est = 0.0;
      const double saved_h = h_;
      bool ok = false;
      try {
        for (int tries = 0; tries < 2 && !ok; ++tries) ok = attempt(h, y, yp, est);
      } catch (const IntegrationFailure&) {
        ok = false;
      }
      h_ = saved_h;
      if (ok) {
        accept(best_t, y, yp);
        enforced = true;
      } else {
        ht_.push_front(t_new);
        hy_.push_front(y_new);
        traj_.push_sample(saved.taus[0], saved.values[0], saved.slopes[0], saved.enforced[0] != 0);
        traj_.segments.push_back(std::move(saved_seg));
        ++traj_.stats.steps;
      }
    }
    if (!enforced && best_t < t_new) {
      // keep the interpolated state as the final sample
      traj_.taus.back() = best_t;
      traj_.values.back() = y_evt;
      traj_.slopes.back() = yp_evt;
      traj_.enforced.back() = 0;
      traj_.segments.back().t_hi = best_t;
    }
    traj_.events.push_back({best_t, events[best_e].id, events[best_e].direction});
    return true;
  }

  static bool crossed(Crossing dir, double g0, double g1) {
    const bool rising = g0 < 0.0 && g1 >= 0.0;
    const bool falling = g0 > 0.0 && g1 <= 0.0;
    switch (dir) {
      case Crossing::Rising: return rising;
      case Crossing::Falling: return falling;
      case Crossing::Either: return rising || falling;
    }
    return false;
  }

  void restart_after_breakpoint(double tb) {
    // right limit: algebraic states jump with the inputs, differential ones are continuous
    const double tr = tb + 1e-12 * std::max(1.0, std::abs(tb));
    auto y = hy_.front();
    if (sys_.algebraic_count() > 0) {
      InitOptions io;
      io.init_tol = opt_.init_tol;
      auto init = consistent_init(sys_, tr, y, io);
      y = init.y;
    }
    yp0_ = detail::solve_slopes(sys_, tr, y, opt_.init_tol, 50);
    ht_.assign(1, tb);
    hy_.assign(1, y);
    k_ = 1;
    at_order_ = 0;
    jac_valid_ = false;
    const double d0 = std::max(wrms(y, y, opt_.rtol, opt_.atol), 1e-2 / opt_.rtol);
    const double d1 = wrms(yp0_, y, opt_.rtol, opt_.atol);
    if (d1 * h_ > 0.01 * d0) h_ = std::max(0.01 * d0 / d1, h_floor_ * 10.0);
    for (std::size_t e = 0; e < g_prev_.size(); ++e) g_prev_[e] = sys_.stop_events[e].fn(tb, y);
  }

  void choose_next(double h, double est_k) {
    const std::size_t k = k_;
    const double t_new = ht_.front();
    // estimates at neighbouring orders are formed on the accepted point
    // against the history that preceded it
    std::deque<double> ht_save(ht_.begin() + 1, ht_.end());
    std::deque<std::vector<double>> hy_save(hy_.begin() + 1, hy_.end());
    std::swap(ht_, ht_save);
    std::swap(hy_, hy_save);
    const auto& y = hy_save.front();
    double est_lo = INFINITY, est_hi = INFINITY;
    if (k > 1) est_lo = estimate(k - 1, t_new, y, h);
    if (k < static_cast<std::size_t>(opt_.max_order) && at_order_ >= static_cast<int>(k) + 1 &&
        ht_.size() >= k + 2)
      est_hi = estimate(k + 1, t_new, y, h);
    std::swap(ht_, ht_save);
    std::swap(hy_, hy_save);

    std::size_t new_k = k;
    double est = est_k;
    if (k > 1 && est_lo <= est_k) {
      new_k = k - 1;
      est = est_lo;
    } else if (est_hi < est_k) {
      new_k = k + 1;
      est = est_hi;
    }
    if (new_k != k) at_order_ = 0;
    k_ = static_cast<int>(new_k);

    const double r = std::pow(2.0 * est + 1e-4, -1.0 / static_cast<double>(new_k + 1));
    double h_new = h;
    if (r >= 2.0) h_new = 2.0 * h;
    else if (r <= 1.0) h_new = h * std::max(0.5, std::min(0.9, r));
    h_ = std::min(h_new, opt_.h_max);
  }

  const DaeSystem& sys_;
  BdfOptions opt_;
  std::size_t n_;
  Trajectory traj_;
  std::deque<double> ht_;
  std::deque<std::vector<double>> hy_;
  std::vector<double> yp0_;
  std::vector<double> g_prev_;
  double h_ = 0.0;
  double h_try_ = 0.0;
  double h_floor_ = 0.0;
  int k_ = 1;
  int at_order_ = 0;
  int error_fails_ = 0;
  Eigen::MatrixXd fy_, fyp_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  double lu_a0_ = std::numeric_limits<double>::quiet_NaN();
  bool jac_valid_ = false;
  int jac_age_ = 0;
};

}  // namespace detail

/**
 * Adaptive variable-order (1-5), variable-step BDF integration of an index-1
 * system over `span`, stopping at the first stop-event crossing.
 * `y0` must be consistent.
 */
inline Trajectory integrate_index1(const DaeSystem& sys, std::vector<double> y0,
                                   std::pair<double, double> span, const BdfOptions& opt) {
  detail::BdfIntegrator integ(sys, opt);
  return integ.run(std::move(y0), span.first, span.second);
}

/// As above, recording a checkpoint at every breakpoint reached.
inline Trajectory integrate_index1(const DaeSystem& sys, std::vector<double> y0,
                                   std::pair<double, double> span, const BdfOptions& opt,
                                   std::vector<BdfCheckpoint>& record) {
  detail::BdfIntegrator integ(sys, opt);
  return integ.run(std::move(y0), span.first, span.second, &record);
}

/// Continue `base` past checkpoint `cp` under `sys`, which must agree with
/// the system that produced `base` on [span.first, cp.t].
inline Trajectory resume_index1(const DaeSystem& sys, const Trajectory& base, const BdfCheckpoint& cp,
                                std::pair<double, double> span, const BdfOptions& opt) {
  detail::BdfIntegrator integ(sys, opt);
  return integ.resume(base, cp, span.first, span.second);
}

inline Trajectory integrate_index1(const DaeSystem& sys, std::vector<double> y0,
                                   std::pair<double, double> span, double tol) {
  return integrate_index1(sys, std::move(y0), span, BdfOptions::with_tol(tol));
}

}  // namespace stefan_oc::dae
