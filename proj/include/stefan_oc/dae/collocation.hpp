#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stefan_oc/core/errors.hpp"
#include "stefan_oc/dae/newton.hpp"
#include "stefan_oc/dae/radau.hpp"
#include "stefan_oc/dae/system.hpp"
#include "stefan_oc/dae/trajectory.hpp"

namespace stefan_oc::dae {

struct CollocationConfig {
  double d_tau = 0.12;
  int nodes = 5;
  double newton_tol = 1e-8;
  int newton_max_iter = 50;
  double damping = 0.5;
  int max_halvings = 30;
  std::size_t max_elements = 200000;
  double event_tol = 1e-12;

  void validate() const {
    if (nodes < 2 || nodes > 8) throw ConfigError("nodes", "must lie in [2, 8]");
    if (!(d_tau > 0.0 && std::isfinite(d_tau))) throw ConfigError("d_tau", "must be > 0");
    if (!(newton_tol > 0.0)) throw ConfigError("newton_tol", "must be > 0");
    if (newton_max_iter < 1) throw ConfigError("newton_max_iter", "must be >= 1");
    if (!(damping > 0.0 && damping < 1.0)) throw ConfigError("damping", "must lie in (0, 1)");
  }
};

namespace detail {

/**
 * Radau collocation marched element by element. Element unknowns are the
 * values at the m collocation points; differential variables interpolate
 * through the element start as well, algebraic ones only through the points.
 */
class Collocator {
 public:
  Collocator(const DaeSystem& sys, const CollocationConfig& cfg)
      : sys_(sys), cfg_(cfg), n_(sys.dim), m_(static_cast<std::size_t>(cfg.nodes)) {
    c_ = radau_points(cfg.nodes);
    std::vector<double> full{0.0};
    full.insert(full.end(), c_.begin(), c_.end());
    d_full_ = lagrange_diff_matrix(full);
    d_alg_ = lagrange_diff_matrix(c_);
  }

  Trajectory run(std::vector<double> y0, double t0, double t1) {
    sys_.validate();
    cfg_.validate();
    if (y0.size() != n_) throw DomainError("initial vector has wrong length");
    if (!(t1 > t0)) throw ConfigError("span", "empty collocation interval");
    for (double v : y0)
      if (!std::isfinite(v)) throw DomainError("initial guess is not finite");
    const double count = std::ceil((t1 - t0) / cfg_.d_tau - 1e-9);
    if (count > static_cast<double>(cfg_.max_elements))
      throw ConfigError("max_elements", "horizon needs more elements than allowed");

    traj_ = Trajectory{};
    traj_.kinds = sys_.kinds;
    lu_valid_ = false;

    std::vector<double> x_start = y0;
    std::vector<double> guess(m_ * n_);
    for (std::size_t k = 0; k < m_; ++k)
      std::copy(y0.begin(), y0.end(), guess.begin() + static_cast<std::ptrdiff_t>(k * n_));

    std::vector<double> g_prev(sys_.stop_events.size());
    for (std::size_t e = 0; e < g_prev.size(); ++e) g_prev[e] = sys_.stop_events[e].fn(t0, y0);

    double te = t0;
    std::size_t element = 0;
    bool first = true;
    while (te < t1 - 1e-12 * std::max(1.0, std::abs(t1))) {
      double h = std::min(cfg_.d_tau, t1 - te);
      if (t1 - (te + h) < 1e-9 * cfg_.d_tau) h = t1 - te;
      std::vector<double> Y;
      try {
        solve_with_fallback(te, h, x_start, guess, Y, element);
      } catch (const CollocationFailure&) {
        // the element may run past a stop event into states the model rejects
        if (!shortened_event_element(te, h, x_start, g_prev, Y)) throw;
      }
      ++traj_.stats.elements;

      if (first) {
        // initial sample: given differential values, algebraic ones from the first polynomial
        std::vector<double> y_init(n_), yp_init(n_);
        eval_element(te, h, x_start, Y, te, y_init.data(), yp_init.data());
        for (std::size_t i = 0; i < n_; ++i)
          if (!sys_.is_algebraic(i)) y_init[i] = x_start[i];
        traj_.push_sample(te, y_init, yp_init, false);
        first = false;
      }

      // stop events at the collocation points
      std::size_t hit_event = 0;
      double hit_t = INFINITY;
      const std::vector<double> g_start = g_prev;
      if (!sys_.stop_events.empty())
        find_event(te, h, x_start, Y, g_prev, hit_event, hit_t);

      if (std::isfinite(hit_t)) {
        double t_evt = hit_t;
        const std::vector<double> Y_full = Y;
        try {
          t_evt = te + refine_event(te, h, x_start, Y, hit_event, hit_t, g_start[hit_event], element);
          push_element(te, t_evt - te, x_start, Y);
        } catch (const CollocationFailure&) {
          // short elements of a high-index system are too ill-conditioned to
          // re-solve; cut the solved element at the located crossing instead
          push_truncated(te, h, x_start, Y_full, hit_t);
        }
        traj_.events.push_back({t_evt, sys_.stop_events[hit_event].id, sys_.stop_events[hit_event].direction});
        return std::move(traj_);
      }

      push_element(te, h, x_start, Y);
      // continuation: end value of differential states, extrapolated guess for the next element
      const double tn = te + h;
      std::vector<double> next_guess(m_ * n_);
      for (std::size_t k = 0; k < m_; ++k)
        eval_element(te, h, x_start, Y, tn + c_[k] * cfg_.d_tau,
                     next_guess.data() + k * n_, nullptr);
      for (std::size_t i = 0; i < n_; ++i) x_start[i] = Y[(m_ - 1) * n_ + i];
      guess = std::move(next_guess);
      prev_end_.assign(Y.begin() + static_cast<std::ptrdiff_t>((m_ - 1) * n_), Y.end());
      te = tn;
      ++element;
    }
    return std::move(traj_);
  }

 private:
  /// Point values and slopes of the element polynomial at time x.
  void eval_element(double te, double h, std::span<const double> x_start, std::span<const double> Y,
                    double x, double* value, double* slope) const {
    const double s = (x - te) / h;
    std::vector<double> nodes_full{0.0};
    nodes_full.insert(nodes_full.end(), c_.begin(), c_.end());
    std::vector<double> lf(m_ + 1), df(m_ + 1), la(m_), da(m_);
    basis(nodes_full, s, lf, df);
    basis(c_, s, la, da);
    for (std::size_t i = 0; i < n_; ++i) {
      double v = 0.0, d = 0.0;
      if (sys_.is_algebraic(i)) {
        for (std::size_t k = 0; k < m_; ++k) {
          v += la[k] * Y[k * n_ + i];
          d += da[k] * Y[k * n_ + i];
        }
      } else {
        v = lf[0] * x_start[i];
        d = df[0] * x_start[i];
        for (std::size_t k = 0; k < m_; ++k) {
          v += lf[k + 1] * Y[k * n_ + i];
          d += df[k + 1] * Y[k * n_ + i];
        }
      }
      if (value) value[i] = v;
      if (slope) slope[i] = d / h;
    }
  }

  static void basis(const std::vector<double>& nodes, double x, std::vector<double>& l,
                    std::vector<double>& d) {
    const std::size_t m = nodes.size();
    for (std::size_t k = 0; k < m; ++k) {
      double lk = 1.0, dk = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j == k) continue;
        const double inv = 1.0 / (nodes[k] - nodes[j]);
        dk = dk * (x - nodes[j]) * inv + lk * inv;
        lk *= (x - nodes[j]) * inv;
      }
      l[k] = lk;
      d[k] = dk;
    }
  }

  /// Slopes at the collocation points implied by the element unknowns.
  void slopes(double h, std::span<const double> x_start, std::span<const double> Y,
              std::vector<double>& YP) const {
    YP.assign(m_ * n_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      for (std::size_t i = 0; i < n_; ++i) {
        double d = 0.0;
        if (sys_.is_algebraic(i)) {
          for (std::size_t j = 0; j < m_; ++j) d += d_alg_[k][j] * Y[j * n_ + i];
        } else {
          d = d_full_[k + 1][0] * x_start[i];
          for (std::size_t j = 0; j < m_; ++j) d += d_full_[k + 1][j + 1] * Y[j * n_ + i];
        }
        YP[k * n_ + i] = d / h;
      }
    }
  }

  bool element_residual(double te, double h, std::span<const double> x_start,
                        std::span<const double> Y, std::vector<double>& R) {
    std::vector<double> YP;
    slopes(h, x_start, Y, YP);
    R.resize(m_ * n_);
    try {
      for (std::size_t k = 0; k < m_; ++k) {
        sys_.residual(te + c_[k] * h, Y.subspan(k * n_, n_),
                      std::span<const double>(YP).subspan(k * n_, n_),
                      std::span<double>(R).subspan(k * n_, n_));
      }
    } catch (const DomainError&) {
      return false;
    }
    traj_.stats.residual_evals += m_;
    for (double v : R)
      if (!std::isfinite(v)) return false;
    return true;
  }

  void build_jacobian(double te, double h, std::span<const double> x_start, std::span<const double> Y) {
    std::vector<double> YP;
    slopes(h, x_start, Y, YP);
    const std::size_t N = m_ * n_;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    Eigen::MatrixXd fy, fyp;
    std::vector<double> f0(n_);
    for (std::size_t k = 0; k < m_; ++k) {
      const double tk = te + c_[k] * h;
      auto yk = Y.subspan(k * n_, n_);
      auto ypk = std::span<const double>(YP).subspan(k * n_, n_);
      sys_.residual(tk, yk, ypk, f0);
      ++traj_.stats.residual_evals;
      fd_jacobians(sys_, tk, yk, ypk, f0, fy, fyp, traj_.stats);
      const auto row = static_cast<Eigen::Index>(k * n_);
      for (std::size_t j = 0; j < m_; ++j) {
        const auto col = static_cast<Eigen::Index>(j * n_);
        auto block = J.block(row, col, static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
        if (j == k) block += fy;
        for (std::size_t i = 0; i < n_; ++i) {
          const double dcoef = sys_.is_algebraic(i) ? d_alg_[k][j] : d_full_[k + 1][j + 1];
          block.col(static_cast<Eigen::Index>(i)) += fyp.col(static_cast<Eigen::Index>(i)) * (dcoef / h);
        }
      }
    }
    lu_.compute(J);
    lu_valid_ = true;
    lu_h_ = h;
  }

  /// Damped Newton on one element; chord iterations reuse the last factorization.
  bool solve_element(double te, double h, std::span<const double> x_start, std::vector<double>& Y,
                     double& res_norm) {
    std::vector<double> R, Rt, Yt;
    if (!element_residual(te, h, x_start, Y, R)) {
      res_norm = INFINITY;
      return false;
    }
    res_norm = inf_norm(R);
    bool fresh = false;
    if (!lu_valid_ || lu_h_ != h) {
      build_jacobian(te, h, x_start, Y);
      fresh = true;
    }
    int crawling = 0;
    for (int it = 0; it < cfg_.newton_max_iter; ++it) {
      if (res_norm <= cfg_.newton_tol) return true;
      Eigen::Map<Eigen::VectorXd> rv(R.data(), static_cast<Eigen::Index>(R.size()));
      const Eigen::VectorXd dx = lu_.solve(-rv);
      ++traj_.stats.newton_iterations;
      double lam = 1.0;
      bool improved = false;
      double new_norm = INFINITY;
      if (dx.allFinite()) {
        for (int k = 0; k <= cfg_.max_halvings; ++k) {
          Yt = Y;
          for (std::size_t i = 0; i < Yt.size(); ++i) Yt[i] += lam * dx[static_cast<Eigen::Index>(i)];
          if (element_residual(te, h, x_start, Yt, Rt)) {
            new_norm = inf_norm(Rt);
            if (new_norm < res_norm) {
              improved = true;
              break;
            }
          }
          if (!fresh) break;  // a stale matrix gets one try before refreshing
          lam *= cfg_.damping;
        }
      }
      if (!improved) {
        if (fresh) return false;
        build_jacobian(te, h, x_start, Y);
        fresh = true;
        continue;
      }
      // heavily damped steps that barely reduce the residual: give up early
      // and let the caller try a better starting guess
      if (fresh && new_norm > 0.9 * res_norm && ++crawling >= kMaxCrawl) return false;
      const bool slow = new_norm > 0.3 * res_norm;
      Y = Yt;
      R = Rt;
      res_norm = new_norm;
      if (slow && !fresh && res_norm > cfg_.newton_tol) {
        build_jacobian(te, h, x_start, Y);
        fresh = true;
      } else if (slow && fresh) {
        fresh = false;  // allow one more refresh if progress stays slow
      } else {
        fresh = false;
      }
    }
    return res_norm <= cfg_.newton_tol;
  }

  void solve_with_fallback(double te, double h, std::span<const double> x_start,
                           const std::vector<double>& guess, std::vector<double>& Y,
                           std::size_t element) {
    double rn = INFINITY;
    Y = guess;
    if (solve_element(te, h, x_start, Y, rn)) return;
    // constant continuation from the element start
    double best = rn;
    Y.resize(m_ * n_);
    for (std::size_t k = 0; k < m_; ++k)
      for (std::size_t i = 0; i < n_; ++i)
        Y[k * n_ + i] = (sys_.is_algebraic(i) && !prev_end_.empty()) ? prev_end_[i] : x_start[i];
    lu_valid_ = false;
    if (solve_element(te, h, x_start, Y, rn)) return;
    best = std::min(best, rn);
    // continuation in the element length; the accepted element keeps its length
    std::vector<double> Ys;
    if (stretched_guess(te, h, x_start, Ys)) {
      Y = std::move(Ys);
      lu_valid_ = false;
      if (solve_element(te, h, x_start, Y, rn)) return;
      best = std::min(best, rn);
    }
    throw CollocationFailure("collocation Newton iteration stagnated", best, element, te);
  }

  /// Search for a shorter element ending past a stop event when the full one
  /// cannot be solved. On success h and Y describe that element.
  bool shortened_event_element(double te, double& h, std::span<const double> x_start,
                               const std::vector<double>& g_prev, std::vector<double>& Y) {
    if (sys_.stop_events.empty()) return false;
    double lo = 0.0, hi = h;
    for (int it = 0; it < 40 && hi - lo > 1e-12 * std::max(1.0, std::abs(te)); ++it) {
      const double hs = 0.5 * (lo + hi);
      std::vector<double> Ys(m_ * n_);
      for (std::size_t k = 0; k < m_; ++k)
        for (std::size_t i = 0; i < n_; ++i)
          Ys[k * n_ + i] = (sys_.is_algebraic(i) && !prev_end_.empty()) ? prev_end_[i] : x_start[i];
      double rn = INFINITY;
      lu_valid_ = false;
      bool ok = solve_element(te, hs, x_start, Ys, rn);
      if (!ok && stretched_guess(te, hs, x_start, Ys)) {
        lu_valid_ = false;
        ok = solve_element(te, hs, x_start, Ys, rn);
      }
      if (!ok) {
        hi = hs;
        continue;
      }
      auto g = g_prev;
      std::size_t hit_event = 0;
      double hit_t = INFINITY;
      find_event(te, hs, x_start, Ys, g, hit_event, hit_t);
      if (std::isfinite(hit_t)) {
        h = hs;
        Y = std::move(Ys);
        return true;
      }
      lo = hs;
    }
    return false;
  }

  /// Starting guess for [te, te + h] by continuation in the element length:
  /// solve a short element from te, then stretch it step by step to h.
  bool stretched_guess(double te, double h, std::span<const double> x_start, std::vector<double>& Y) {
    std::vector<double> Yc(m_ * n_);
    for (std::size_t k = 0; k < m_; ++k)
      for (std::size_t i = 0; i < n_; ++i)
        Yc[k * n_ + i] = (sys_.is_algebraic(i) && !prev_end_.empty()) ? prev_end_[i] : x_start[i];
    const double h_min = h * std::ldexp(1.0, -kMaxSubdivision);
    double hs = 0.5 * h;
    double rn = INFINITY;
    while (true) {
      std::vector<double> Yt = Yc;
      lu_valid_ = false;
      if (solve_element(te, hs, x_start, Yt, rn)) {
        Yc = std::move(Yt);
        break;
      }
      hs *= 0.5;
      if (hs < h_min) return false;
    }
    double grow = 2.0;
    while (hs < h) {
      const double hn = std::min(hs * grow, h);
      std::vector<double> Yt(m_ * n_);
      for (std::size_t k = 0; k < m_; ++k)
        eval_element(te, hs, x_start, Yc, te + c_[k] * hn, Yt.data() + k * n_, nullptr);
      lu_valid_ = false;
      bool ok = solve_element(te, hn, x_start, Yt, rn);
      if (!ok) {
        Yt = Yc;  // same shape on the stretched element
        lu_valid_ = false;
        ok = solve_element(te, hn, x_start, Yt, rn);
      }
      if (ok) {
        Yc = std::move(Yt);
        hs = hn;
        grow = std::min(2.0, 1.0 + 2.0 * (grow - 1.0));
      } else {
        grow = 1.0 + 0.5 * (grow - 1.0);
        if (grow < 1.01) return false;
      }
    }
    Y = std::move(Yc);
    return true;
  }

  void push_element(double te, double h, std::span<const double> x_start, const std::vector<double>& Y) {
    std::vector<double> YP;
    slopes(h, x_start, Y, YP);
    DenseSegment seg;
    seg.t_lo = te;
    seg.t_hi = te + h;
    seg.algebraic_skip_first = true;
    seg.t.push_back(te);
    seg.y.emplace_back(x_start.begin(), x_start.end());
    for (std::size_t k = 0; k < m_; ++k) {
      const double tk = (k + 1 == m_) ? te + h : te + c_[k] * h;
      seg.t.push_back(tk);
      seg.y.emplace_back(Y.begin() + static_cast<std::ptrdiff_t>(k * n_),
                         Y.begin() + static_cast<std::ptrdiff_t>((k + 1) * n_));
      traj_.push_sample(tk, seg.y.back(),
                        std::vector<double>(YP.begin() + static_cast<std::ptrdiff_t>(k * n_),
                                            YP.begin() + static_cast<std::ptrdiff_t>((k + 1) * n_)),
                        true);
    }
    traj_.segments.push_back(std::move(seg));
  }

  /// Push the part of a solved element up to t_cut; the end sample comes from the polynomial.
  void push_truncated(double te, double h, std::span<const double> x_start, const std::vector<double>& Y,
                      double t_cut) {
    std::vector<double> YP;
    slopes(h, x_start, Y, YP);
    DenseSegment seg;
    seg.t_lo = te;
    seg.t_hi = t_cut;
    seg.algebraic_skip_first = true;
    seg.t.push_back(te);
    seg.y.emplace_back(x_start.begin(), x_start.end());
    for (std::size_t k = 0; k < m_; ++k) {
      const double tk = (k + 1 == m_) ? te + h : te + c_[k] * h;
      seg.t.push_back(tk);
      seg.y.emplace_back(Y.begin() + static_cast<std::ptrdiff_t>(k * n_),
                         Y.begin() + static_cast<std::ptrdiff_t>((k + 1) * n_));
      if (tk < t_cut)
        traj_.push_sample(tk, seg.y.back(),
                          std::vector<double>(YP.begin() + static_cast<std::ptrdiff_t>(k * n_),
                                              YP.begin() + static_cast<std::ptrdiff_t>((k + 1) * n_)),
                          true);
    }
    std::vector<double> yc(n_), ypc(n_);
    eval_element(te, h, x_start, Y, t_cut, yc.data(), ypc.data());
    traj_.push_sample(t_cut, yc, ypc, false);
    traj_.segments.push_back(std::move(seg));
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

  void find_event(double te, double h, std::span<const double> x_start, const std::vector<double>& Y,
                  std::vector<double>& g_prev, std::size_t& hit_event, double& hit_t) {
    const auto& events = sys_.stop_events;
    std::vector<double> pts{te};
    for (double c : c_) pts.push_back(te + c * h);
    std::vector<double> yv(n_);
    std::vector<double> g_end(events.size());
    for (std::size_t e = 0; e < events.size(); ++e) {
      double g0 = g_prev[e];
      double t_a = te;
      for (std::size_t k = 0; k < m_; ++k) {
        const double tk = pts[k + 1];
        std::span<const double> yk(Y.data() + k * n_, n_);
        const double g1 = events[e].fn(tk, yk);
        if (crossed(events[e].direction, g0, g1)) {
          // bisection on the element polynomial
          double lo = t_a, hi = tk;
          const double glo = g0;
          while (hi - lo > cfg_.event_tol * std::max(1.0, std::abs(hi))) {
            const double mid = 0.5 * (lo + hi);
            eval_element(te, h, x_start, Y, mid, yv.data(), nullptr);
            const double gm = events[e].fn(mid, yv);
            if ((gm < 0.0) == (glo < 0.0) && gm != 0.0) lo = mid;
            else hi = mid;
          }
          if (hi < hit_t) {
            hit_t = hi;
            hit_event = e;
          }
          break;
        }
        g0 = g1;
        t_a = tk;
      }
      g_end[e] = g0;
      std::span<const double> ylast(Y.data() + (m_ - 1) * n_, n_);
      g_end[e] = events[e].fn(te + h, ylast);
    }
    g_prev = g_end;
  }

  /// Re-solve a shortened element whose end lands on the event. The length
  /// is found by a bracketed secant (Illinois) between the element start and end.
  double refine_event(double te, double h_full, std::span<const double> x_start, std::vector<double>& Y,
                      std::size_t e, double t_guess, double g_start, std::size_t element) {
    const auto& ev = sys_.stop_events[e];
    const double scale = std::max(1.0, std::abs(t_guess));
    const std::vector<double> Y_full = Y;
    auto solve_len = [&](double h, std::vector<double>& Yh) {
      Yh.assign(m_ * n_, 0.0);
      for (std::size_t k = 0; k < m_; ++k)
        eval_element(te, h_full, x_start, Y_full, te + c_[k] * h, Yh.data() + k * n_, nullptr);
      double rn = INFINITY;
      lu_valid_ = false;
      if (!solve_element(te, h, x_start, Yh, rn))
        throw CollocationFailure("event element did not converge", rn, element, te);
      return ev.fn(te + h, std::span<const double>(Yh.data() + (m_ - 1) * n_, n_));
    };
    const double min_h = 1e-10 * scale;
    double a = 0.0, ga = g_start;
    double b = h_full, gb = ev.fn(te + h_full, std::span<const double>(Y_full.data() + (m_ - 1) * n_, n_));
    double h = std::clamp(t_guess - te, min_h, h_full);
    std::vector<double> Yh;
    double gh = solve_len(h, Yh);
    int side = 0;
    for (int it = 0; it < 60 && gh != 0.0; ++it) {
      if ((gh < 0.0) == (ga < 0.0)) {
        a = h;
        ga = gh;
        if (side == -1) gb *= 0.5;
        side = -1;
      } else {
        b = h;
        gb = gh;
        if (side == 1) ga *= 0.5;
        side = 1;
      }
      if (b - a <= cfg_.event_tol * scale) break;
      double hn = (ga != gb) ? a - ga * (b - a) / (gb - ga) : 0.5 * (a + b);
      if (!(hn > a && hn < b)) hn = 0.5 * (a + b);
      h = std::max(hn, min_h);
      gh = solve_len(h, Yh);
    }
    // land on the crossing side so the event is seen as having fired
    if ((gh < 0.0) == (g_start < 0.0) && gh != 0.0 && b > h) {
      h = b;
      gh = solve_len(h, Yh);
    }
    Y = std::move(Yh);
    lu_valid_ = false;
    return h;
  }

  const DaeSystem& sys_;
  CollocationConfig cfg_;
  std::size_t n_;
  std::size_t m_;
  std::vector<double> c_;
  std::vector<std::vector<double>> d_full_;
  std::vector<std::vector<double>> d_alg_;
  std::vector<double> prev_end_;
  static constexpr int kMaxSubdivision = 24;
  static constexpr int kMaxCrawl = 4;
  Trajectory traj_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  bool lu_valid_ = false;
  double lu_h_ = 0.0;
};

}  // namespace detail

/**
 * Orthogonal collocation on finite elements of fixed length over `span`,
 * for systems of any index. Stops at the first stop-event crossing.
 */
inline Trajectory collocate(const DaeSystem& sys, std::vector<double> y0_guess,
                            std::pair<double, double> span, const CollocationConfig& cfg = {}) {
  detail::Collocator col(sys, cfg);
  return col.run(std::move(y0_guess), span.first, span.second);
}

}  // namespace stefan_oc::dae
