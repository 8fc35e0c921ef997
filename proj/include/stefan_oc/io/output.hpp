#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stefan_oc/core/errors.hpp"
#include "stefan_oc/io/config.hpp"
#include "stefan_oc/metrics/bench.hpp"
#include "stefan_oc/ocp/report.hpp"

namespace stefan_oc::io {

/// Shortest text that reads back to the same double.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

inline json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw ConfigError("out", "cannot create output directory '" + dir.string() + "'");
}

inline std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream f(file, std::ios::binary);
  if (!f) throw ConfigError("out", "cannot write '" + file.string() + "'");
  return f;
}

inline void write_json(const std::filesystem::path& file, const json& j) {
  auto f = open_out(file);
  f << j.dump(2) << '\n';
}

inline std::vector<std::string> trajectory_header(std::size_t n) {
  std::vector<std::string> h{"tau", "s", "ds_dtau", "theta_avg", "dtheta_avg_dtau", "theta_b"};
  for (std::size_t i = 0; i < n; ++i) h.push_back("theta1_" + std::to_string(i));
  for (std::size_t j = 1; j <= n; ++j) h.push_back("theta2_" + std::to_string(j));
  return h;
}

/// Observables followed by every stored node temperature, one row per sample.
inline void write_trajectory_csv(std::ostream& out, const ocp::Observables& o, const dae::Trajectory& tr,
                                 std::size_t n) {
  const auto h = trajectory_header(n);
  for (std::size_t c = 0; c < h.size(); ++c) out << (c ? "," : "") << h[c];
  out << '\n';
  for (std::size_t i = 0; i < o.tau.size(); ++i) {
    out << num(o.tau[i]) << ',' << num(o.s[i]) << ',' << num(o.ds_dtau[i]) << ',' << num(o.theta_avg[i]) << ','
        << num(o.dtheta_avg_dtau[i]) << ',' << num(o.theta_b[i]);
    for (std::size_t c = 0; c < 2 * n; ++c) out << ',' << num(tr.values[i][c]);
    out << '\n';
  }
}

/// Breakpoints of a shooting control with the heater value at each; a
/// piecewise-constant control reports the value of the interval ending there.
inline void write_nodes_csv(std::ostream& out, const ocp::SolveReport& r) {
  out << "breakpoint,tau,theta_b\n";
  const auto& b = r.control_breakpoints;
  const auto& v = r.control_nodes;
  for (std::size_t k = 0; k < b.size(); ++k) {
    std::size_t i = k;
    if (r.control_kind == "constant") i = k == 0 ? 0 : k - 1;
    out << k << ',' << num(b[k]) << ',' << (i < v.size() ? num(v[i]) : std::string()) << '\n';
  }
}

inline json to_json(const ocp::SwitchEvent& e) {
  json j{{"tau", e.tau},
         {"from", ocp::to_string(e.from_regime)},
         {"to", ocp::to_string(e.to_regime)},
         {"at_start", e.at_start}};
  j["bound"] = e.bound ? json(*e.bound == ocp::BoundSide::Lower ? "lower" : "upper") : json(nullptr);
  return j;
}

inline json to_json(const dae::SolverStats& s) {
  return {{"steps", s.steps},
          {"rejected", s.rejected},
          {"newton_iterations", s.newton_iterations},
          {"residual_evals", s.residual_evals},
          {"jacobians", s.jacobians},
          {"elements", s.elements}};
}

inline json to_json(const ocp::SolveReport& r) {
  json j;
  j["method"] = r.method;
  j["objective"] = to_json(r.spec.objective);
  j["wall_time"] = r.wall_time;
  j["error_norm"] = opt_json(r.error_norm);
  j["thaw_time"] = opt_json(r.thaw_time);
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["simulations"] = r.simulations;
  j["message"] = r.message;
  j["initial_clipped"] = r.initial_clipped;
  j["declared_indices"] = r.declared_indices;
  j["switches"] = json::array();
  for (const auto& e : r.switches) j["switches"].push_back(to_json(e));
  j["samples"] = r.trajectory.size();
  j["solver_stats"] = to_json(r.trajectory.stats);
  if (r.method == "shooting") {
    j["control"] = {{"kind", r.control_kind},
                    {"nc", r.control_breakpoints.empty() ? 0 : r.control_breakpoints.size() - 1},
                    {"nodes", r.control_nodes},
                    {"breakpoints", r.control_breakpoints},
                    {"objective_value", opt_json(r.objective_value)}};
  }
  return j;
}

inline json to_json(const metrics::BenchReport& b) {
  return {{"label", b.label},
          {"mean_wall_time", b.mean_wall_time},
          {"std_wall_time", b.std_wall_time},
          {"repeats", b.repeats},
          {"times", b.times},
          {"error_norm", opt_json(b.error_norm)},
          {"flagged", b.flagged}};
}

inline const char* bench_csv_header() {
  return "problem,method,mean_wall_time,std_wall_time,repeats,rel_std,flagged,error_norm,ratio";
}

inline void write_bench_row(std::ostream& out, const std::string& problem, const metrics::BenchReport& b,
                            std::optional<double> ratio) {
  out << problem << ',' << b.label << ',' << num(b.mean_wall_time) << ',' << num(b.std_wall_time) << ','
      << b.repeats << ',' << num(b.rel_std()) << ',' << (b.flagged ? 1 : 0) << ',' << opt_num(b.error_norm) << ','
      << opt_num(ratio) << '\n';
}

}  // namespace stefan_oc::io
