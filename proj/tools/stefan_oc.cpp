#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stefan_oc/app/commands.hpp"

using namespace stefan_oc;

namespace {

struct Common {
  std::string config;
  std::string preset;
  std::string method;
  std::string out;
  std::string kind;
  int nc = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
  sub->add_option("--preset", c.preset, "problem1 | problem2 | problem3 | problem4");
  sub->add_option("--method", c.method, "sim | shooting");
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--nc", c.nc, "control interval count")->check(CLI::PositiveNumber);
  sub->add_option("--kind", c.kind, "constant | linear");
}

io::RunConfig resolve(const Common& c) {
  io::RunConfig rc;
  if (!c.preset.empty()) rc = io::preset(c.preset);
  if (!c.config.empty()) io::load(io::parse_json_file(c.config), rc);
  if (!c.method.empty()) rc.method = io::parse_method(c.method);
  if (!c.out.empty()) rc.out = c.out;
  if (!c.kind.empty()) rc.control.kind = shooting::parse_control_kind(c.kind);
  if (c.nc > 0) rc.control.n_c = static_cast<std::size_t>(c.nc);
  rc.validate();
  return rc;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used == 0 || used != item.size()) throw ConfigError("setpoints", "not a number: '" + item + "'");
    v.push_back(x);
  }
  return v;
}

void summary(const ocp::SolveReport& r) {
  std::printf("method %s  converged %s  wall %.3f s", r.method.c_str(), r.converged ? "yes" : "no", r.wall_time);
  if (r.error_norm) std::printf("  error_norm %.3e", *r.error_norm);
  if (r.thaw_time) std::printf("  thaw_time %.6f", *r.thaw_time);
  std::printf("  switches %zu\n", r.switches.size());
  if (!r.message.empty()) std::printf("%s\n", r.message.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal heater control for cylindrical thawing"};
  app.require_subcommand(1);

  Common c_sim, c_solve, c_sweep, c_bench;
  double theta_b = -1.0;
  std::string setpoints;
  std::size_t min_repeats = 10;

  auto* sim = app.add_subcommand("simulate", "simulate the plant under a given heater control");
  add_common(sim, c_sim);
  sim->add_option("--theta-b", theta_b, "constant heater temperature")->check(CLI::Range(0.0, 1.0));
  auto* solve = app.add_subcommand("solve", "solve the optimal control problem");
  add_common(solve, c_solve);
  auto* sweep = app.add_subcommand("sweep", "solve once per tracking setpoint");
  add_common(sweep, c_sweep);
  sweep->add_option("--setpoints", setpoints, "comma-separated setpoints");
  auto* bench = app.add_subcommand("benchmark", "time both methods on one problem");
  add_common(bench, c_bench);
  bench->add_option("--min-repeats", min_repeats, "timed runs at least")->check(CLI::Range(2, 100));

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      auto rc = resolve(c_sim);
      if (theta_b >= 0.0) {
        rc.control.value = theta_b;
        rc.control.nodes.clear();
      }
      auto r = app::cmd_simulate(rc);
      std::printf("samples %zu  wall %.3f s", r.trajectory.size(), r.wall_time);
      if (r.thaw_time) std::printf("  thaw_time %.6f", *r.thaw_time);
      if (r.error_norm) std::printf("  error_norm %.3e", *r.error_norm);
      std::printf("\nwrote %s\n", rc.out.c_str());
    } else if (solve->parsed()) {
      auto rc = resolve(c_solve);
      summary(app::cmd_solve(rc));
      std::printf("wrote %s\n", rc.out.c_str());
    } else if (sweep->parsed()) {
      auto rc = resolve(c_sweep);
      const auto values = setpoints.empty() ? rc.setpoints : parse_list(setpoints);
      if (values.empty()) throw ConfigError("setpoints", "need at least one setpoint");
      auto rows = app::cmd_sweep(rc, values);
      int failed = 0;
      for (const auto& r : rows) {
        std::printf("setpoint %+.4f  ", r.setpoint);
        if (r.ok) summary(r.report);
        else {
          ++failed;
          std::printf("failed: %s\n", r.error.c_str());
        }
      }
      std::printf("wrote %s\n", rc.out.c_str());
      return failed == 0 ? 0 : 1;
    } else if (bench->parsed()) {
      auto rc = resolve(c_bench);
      metrics::BenchOptions bo;
      bo.min_repeats = min_repeats;
      auto p = app::cmd_benchmark(rc, bo);
      for (const auto* b : {&p.sim, &p.shooting})
        std::printf("%-9s mean %.4f s  std %.4f s  repeats %zu%s\n", b->label.c_str(), b->mean_wall_time,
                    b->std_wall_time, b->repeats, b->flagged ? "  (flagged)" : "");
      std::printf("ratio %.2f\nwrote %s\n", p.ratio, rc.out.c_str());
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
