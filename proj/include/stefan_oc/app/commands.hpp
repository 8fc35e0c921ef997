#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "stefan_oc/io/config.hpp"
#include "stefan_oc/io/output.hpp"
#include "stefan_oc/metrics/bench.hpp"
#include "stefan_oc/ocp/simulate.hpp"
#include "stefan_oc/shooting/shooting.hpp"

namespace stefan_oc::app {

namespace fs = std::filesystem;

/// Plant run under the configured control, to melt or to the span end.
struct SimulateResult {
  dae::Trajectory trajectory;
  ocp::Observables observables;
  std::optional<double> thaw_time;
  std::optional<double> error_norm;  ///< against the configured objective, if it tracks
  double wall_time = 0.0;
};

inline shooting::ControlParam simulate_control_param(const io::RunConfig& rc) {
  const auto& c = rc.control;
  shooting::ControlParam cp;
  if (c.nodes.empty()) {
    cp = shooting::ControlParam::uniform(shooting::ControlKind::PiecewiseConstant, 1, c.value, 0.0,
                                         rc.spec.span_end());
  } else {
    cp = shooting::ControlParam::uniform(c.kind, c.n_c, 0.0, 0.0, shooting::control_horizon(rc.spec, rc.nlp));
    cp.nodes = c.nodes;
  }
  cp.lo = rc.spec.control_bounds.lo;
  cp.hi = rc.spec.control_bounds.hi;
  cp.validate();
  return cp;
}

inline SimulateResult run_simulate(const io::RunConfig& rc) {
  const auto start = std::chrono::steady_clock::now();
  rc.validate();
  auto layout = std::make_shared<ocp::StateLayout>(std::make_shared<model::StefanModel>(rc.spec.model));
  const auto cp = simulate_control_param(rc);
  ocp::OcpSpec plant = rc.spec;
  plant.objective = ocp::MinTime{};  // run to melt or the span end whatever is tracked
  auto run = shooting::simulate_control(plant, cp, rc.nlp, layout);
  if (run.failed) throw IntegrationFailure("plant simulation failed: " + run.message, 0.0, {});
  SimulateResult r;
  r.trajectory = std::move(run.trajectory);
  r.observables = ocp::compute_observables(*layout, r.trajectory, rc.spec.average);
  r.thaw_time = ocp::thawing_time(r.trajectory);
  if (ocp::is_tracking(rc.spec.objective) && r.trajectory.size() >= 2)
    r.error_norm = ocp::tracking_error(rc.spec, *layout, r.trajectory, rc.sim.d_tau_sample);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline ocp::SolveReport run_solve(const io::RunConfig& rc) {
  rc.validate();
  if (rc.method == io::Method::Sim) return ocp::solve_simulation_based(rc.spec, rc.sim);
  return shooting::solve_shooting(rc.spec, rc.control.kind, rc.control.n_c, rc.nlp);
}

inline void write_trajectory(const fs::path& file, const ocp::Observables& o, const dae::Trajectory& tr,
                             std::size_t n) {
  auto f = io::open_out(file);
  io::write_trajectory_csv(f, o, tr, n);
}

inline SimulateResult cmd_simulate(const io::RunConfig& rc) {
  auto r = run_simulate(rc);
  io::ensure_dir(rc.out);
  write_trajectory(fs::path(rc.out) / "trajectory.csv", r.observables, r.trajectory, rc.spec.model.n);
  io::json j;
  j["config"] = io::to_json(rc);
  j["control"] = rc.control.nodes.empty() ? io::json{{"kind", "constant"}, {"value", rc.control.value}}
                                          : io::json{{"kind", shooting::to_string(rc.control.kind)},
                                                     {"nc", rc.control.n_c},
                                                     {"nodes", rc.control.nodes}};
  j["thaw_time"] = io::opt_json(r.thaw_time);
  j["error_norm"] = io::opt_json(r.error_norm);
  j["samples"] = r.trajectory.size();
  j["solver_stats"] = io::to_json(r.trajectory.stats);
  j["wall_time"] = r.wall_time;
  io::write_json(fs::path(rc.out) / "run.json", j);
  return r;
}

inline ocp::SolveReport cmd_solve(const io::RunConfig& rc) {
  auto rep = run_solve(rc);
  io::ensure_dir(rc.out);
  write_trajectory(fs::path(rc.out) / "trajectory.csv", rep.observables, rep.trajectory, rc.spec.model.n);
  auto j = io::to_json(rep);
  j["config"] = io::to_json(rc);
  io::write_json(fs::path(rc.out) / "report.json", j);
  if (rep.method == "shooting") {
    auto f = io::open_out(fs::path(rc.out) / "nodes.csv");
    io::write_nodes_csv(f, rep);
  }
  return rep;
}

struct SweepRow {
  double setpoint = 0.0;
  bool ok = false;
  ocp::SolveReport report;
  std::string error;
};

/// Worker count: STEFAN_OC_THREADS when set and positive, else the hardware count.
inline std::size_t sweep_threads(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("STEFAN_OC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) n = static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline const char* sweep_csv_header() {
  return "setpoint,method,status,converged,error_norm,thaw_time,wall_time,switch_count,bound_active,switch_taus,"
         "bound_sides,message";
}

inline void write_sweep_row(std::ostream& out, const SweepRow& r, io::Method m) {
  std::string taus, sides;
  bool bound = false;
  for (const auto& e : r.report.switches) {
    taus += (taus.empty() ? "" : ";") + io::num(e.tau);
    sides += (sides.empty() ? "" : ";") +
             std::string(e.bound ? (*e.bound == ocp::BoundSide::Lower ? "lower" : "upper") : "none");
    bound = bound || e.to_regime == ocp::Regime::BoundActive;
  }
  out << io::num(r.setpoint) << ',' << io::to_string(m) << ',' << (r.ok ? "ok" : "failed") << ','
      << (r.ok && r.report.converged ? 1 : 0) << ',' << (r.ok ? io::opt_num(r.report.error_norm) : "") << ','
      << (r.ok ? io::opt_num(r.report.thaw_time) : "") << ',' << (r.ok ? io::num(r.report.wall_time) : "") << ','
      << r.report.switches.size() << ',' << (bound ? 1 : 0) << ',' << taus << ',' << sides << ','
      << csv_field(r.ok ? r.report.message : r.error) << '\n';
}

/**
 * One solve per setpoint, run concurrently. A failing row is recorded and
 * the sweep continues. Writes sweep.csv and each row's trajectory.
 */
inline std::vector<SweepRow> cmd_sweep(const io::RunConfig& rc, const std::vector<double>& setpoints) {
  if (setpoints.empty()) throw ConfigError("setpoints", "need at least one setpoint");
  rc.validate();
  std::vector<SweepRow> rows(setpoints.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      rows[i].setpoint = setpoints[i];
      try {
        io::RunConfig one = rc;
        one.spec = io::with_setpoint(rc.spec, setpoints[i]);
        rows[i].report = run_solve(one);
        rows[i].ok = true;
      } catch (const std::exception& e) {
        rows[i].error = e.what();
      }
    }
  };
  // configuration problems surface before any thread starts
  io::with_setpoint(rc.spec, setpoints.front());
  const std::size_t nt = sweep_threads(rows.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  io::ensure_dir(rc.out);
  auto f = io::open_out(fs::path(rc.out) / "sweep.csv");
  f << sweep_csv_header() << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    write_sweep_row(f, rows[i], rc.method);
    if (!rows[i].ok) continue;
    const fs::path dir = fs::path(rc.out) / ("setpoint_" + std::to_string(i));
    io::ensure_dir(dir);
    write_trajectory(dir / "trajectory.csv", rows[i].report.observables, rows[i].report.trajectory,
                     rc.spec.model.n);
  }
  return rows;
}

struct BenchPair {
  metrics::BenchReport sim;
  metrics::BenchReport shooting;
  double ratio = 0.0;  ///< shooting mean / sim mean
};

/// Benchmark both methods on the configured problem; writes bench.csv and bench.json.
inline BenchPair cmd_benchmark(const io::RunConfig& rc, const metrics::BenchOptions& bo = {}) {
  rc.validate();
  auto timed = [&](io::Method m) {
    io::RunConfig one = rc;
    one.method = m;
    return metrics::benchmark([&] { return run_solve(one).error_norm; }, bo, io::to_string(m));
  };
  BenchPair p;
  p.sim = timed(io::Method::Sim);
  p.shooting = timed(io::Method::Shooting);
  p.ratio = p.shooting.mean_wall_time / p.sim.mean_wall_time;

  io::ensure_dir(rc.out);
  const std::string problem = rc.problem.empty() ? "custom" : rc.problem;
  auto f = io::open_out(fs::path(rc.out) / "bench.csv");
  f << io::bench_csv_header() << '\n';
  io::write_bench_row(f, problem, p.sim, p.ratio);
  io::write_bench_row(f, problem, p.shooting, p.ratio);
  io::write_json(fs::path(rc.out) / "bench.json",
                 {{"problem", problem},
                  {"config", io::to_json(rc)},
                  {"sim", io::to_json(p.sim)},
                  {"shooting", io::to_json(p.shooting)},
                  {"ratio", p.ratio}});
  return p;
}

}  // namespace stefan_oc::app
