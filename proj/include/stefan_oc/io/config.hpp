#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stefan_oc/core/errors.hpp"
#include "stefan_oc/dae/collocation.hpp"
#include "stefan_oc/model/params.hpp"
#include "stefan_oc/ocp/simulate.hpp"
#include "stefan_oc/ocp/spec.hpp"
#include "stefan_oc/shooting/control.hpp"
#include "stefan_oc/shooting/shooting.hpp"

namespace stefan_oc::io {

using json = nlohmann::json;

enum class Method { Sim, Shooting };

inline const char* to_string(Method m) { return m == Method::Sim ? "sim" : "shooting"; }

inline Method parse_method(const std::string& s) {
  if (s == "sim") return Method::Sim;
  if (s == "shooting") return Method::Shooting;
  throw ConfigError("method", "expected 'sim' or 'shooting', got '" + s + "'");
}

/// Control for a plain simulation: a constant value, or explicit nodes.
struct ControlChoice {
  shooting::ControlKind kind = shooting::ControlKind::PiecewiseLinear;
  std::size_t n_c = 12;
  double value = 0.5;               ///< constant heater temperature when no nodes are given
  std::vector<double> nodes;        ///< explicit node values (simulate only)
};

struct RunConfig {
  std::string problem;  ///< preset id, empty for an inline spec
  ocp::OcpSpec spec;
  Method method = Method::Sim;
  ocp::SimOptions sim;
  shooting::NlpConfig nlp;
  ControlChoice control;
  std::vector<double> setpoints;  ///< sweep values
  std::string out = "out";

  void validate() const {
    spec.validate();
    sim.colloc.validate();
    nlp.validate();
    if (control.n_c < 1) throw ConfigError("control.nc", "must be >= 1");
    if (!control.nodes.empty() && control.nodes.size() != shooting::node_count(control.kind, control.n_c))
      throw ConfigError("control.nodes", "count does not match kind and nc");
  }
};

namespace detail {

inline void only(const json& j, const std::string& ctx, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(ctx.empty() ? "config" : ctx, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) throw ConfigError(ctx.empty() ? it.key() : ctx + "." + it.key(), "unknown field");
}

inline std::string path(const std::string& ctx, const char* key) { return ctx.empty() ? key : ctx + "." + key; }

template <class T>
void get(const json& j, const std::string& ctx, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path(ctx, key), "wrong type");
  }
}

inline void get_size(const json& j, const std::string& ctx, const char* key, std::size_t& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError(path(ctx, key), "expected a nonnegative integer");
  out = v.get<std::size_t>();
}

}  // namespace detail

/// Overlay the fields present in j onto p. Unknown fields are rejected.
inline void load(const json& j, model::ModelParams& p, const std::string& ctx = "model") {
  detail::only(j, ctx, {"n", "stefan_number", "alpha_ratio", "k_ratio", "biot", "wall_ratio", "eps_front",
                        "theta_max"});
  detail::get_size(j, ctx, "n", p.n);
  detail::get(j, ctx, "stefan_number", p.stefan_number);
  detail::get(j, ctx, "alpha_ratio", p.alpha_ratio);
  detail::get(j, ctx, "k_ratio", p.k_ratio);
  detail::get(j, ctx, "biot", p.biot);
  detail::get(j, ctx, "wall_ratio", p.wall_ratio);
  detail::get(j, ctx, "eps_front", p.eps_front);
  detail::get(j, ctx, "theta_max", p.theta_max);
}

inline ocp::Objective load_objective(const json& j, const std::string& ctx = "objective") {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ConfigError(ctx, "expected an object with a string 'kind'");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "min_time") {
    detail::only(j, ctx, {"kind"});
    return ocp::MinTime{};
  }
  if (kind != "track_temperature_rate" && kind != "track_interface_velocity")
    throw ConfigError(ctx + ".kind", "unknown objective '" + kind + "'");
  detail::only(j, ctx, {"kind", "setpoint"});
  if (!j.contains("setpoint")) throw ConfigError(ctx + ".setpoint", "required for tracking objectives");
  double sp = 0.0;
  detail::get(j, ctx, "setpoint", sp);
  if (kind == "track_temperature_rate") return ocp::TrackTemperatureRate{sp};
  return ocp::TrackInterfaceVelocity{sp};
}

inline ocp::Horizon load_horizon(const json& j, const std::string& ctx = "horizon") {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ConfigError(ctx, "expected an object with a string 'kind'");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "stop_on_melt") {
    detail::only(j, ctx, {"kind"});
    return ocp::StopOnMelt{};
  }
  if (kind != "fixed") throw ConfigError(ctx + ".kind", "expected 'stop_on_melt' or 'fixed'");
  detail::only(j, ctx, {"kind", "tau_f"});
  ocp::FixedHorizon f;
  if (!j.contains("tau_f")) throw ConfigError(ctx + ".tau_f", "required for a fixed horizon");
  detail::get(j, ctx, "tau_f", f.tau_f);
  return f;
}

inline void load(const json& j, ocp::OcpSpec& s, const std::string& ctx = "problem") {
  detail::only(j, ctx, {"objective", "control_bounds", "horizon", "model", "theta_b_guess", "average",
                        "max_horizon"});
  if (j.contains("objective")) s.objective = load_objective(j.at("objective"), detail::path(ctx, "objective"));
  if (j.contains("control_bounds")) {
    const auto& b = j.at("control_bounds");
    if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
      throw ConfigError(detail::path(ctx, "control_bounds"), "expected [lo, hi]");
    s.control_bounds = {b[0].get<double>(), b[1].get<double>()};
  }
  if (j.contains("horizon")) s.horizon = load_horizon(j.at("horizon"), detail::path(ctx, "horizon"));
  if (j.contains("model")) load(j.at("model"), s.model, detail::path(ctx, "model"));
  detail::get(j, ctx, "theta_b_guess", s.theta_b_guess);
  if (j.contains("average")) {
    const auto actx = detail::path(ctx, "average");
    const auto& a = j.at("average");
    detail::only(a, actx, {"include_wall", "area_weighted"});
    detail::get(a, actx, "include_wall", s.average.include_wall);
    detail::get(a, actx, "area_weighted", s.average.area_weighted);
  }
  detail::get(j, ctx, "max_horizon", s.max_horizon);
}

inline void load(const json& j, dae::CollocationConfig& c, const std::string& ctx = "collocation") {
  detail::only(j, ctx, {"d_tau", "nodes", "newton_tol", "newton_max_iter", "damping"});
  detail::get(j, ctx, "d_tau", c.d_tau);
  detail::get(j, ctx, "nodes", c.nodes);
  detail::get(j, ctx, "newton_tol", c.newton_tol);
  detail::get(j, ctx, "newton_max_iter", c.newton_max_iter);
  detail::get(j, ctx, "damping", c.damping);
}

inline ocp::Backend parse_backend(const std::string& s) {
  if (s == "auto") return ocp::Backend::Auto;
  if (s == "bdf") return ocp::Backend::Bdf;
  if (s == "collocation") return ocp::Backend::Collocation;
  throw ConfigError("sim.backend", "expected 'auto', 'bdf' or 'collocation'");
}

inline const char* to_string(ocp::Backend b) {
  switch (b) {
    case ocp::Backend::Auto: return "auto";
    case ocp::Backend::Bdf: return "bdf";
    case ocp::Backend::Collocation: return "collocation";
  }
  return "auto";
}

inline void load(const json& j, ocp::SimOptions& o, const std::string& ctx = "sim") {
  detail::only(j, ctx, {"backend", "bdf_tol", "max_switches", "switch_margin", "d_tau_sample"});
  if (j.contains("backend")) {
    std::string b;
    detail::get(j, ctx, "backend", b);
    o.backend = parse_backend(b);
  }
  detail::get(j, ctx, "bdf_tol", o.bdf_tol);
  detail::get(j, ctx, "max_switches", o.max_switches);
  detail::get(j, ctx, "switch_margin", o.switch_margin);
  detail::get(j, ctx, "d_tau_sample", o.d_tau_sample);
}

inline void load(const json& j, shooting::NlpConfig& n, const std::string& ctx = "nlp") {
  detail::only(j, ctx, {"opt_tol", "integ_tol", "quad_dtau", "fd_step", "max_iter", "horizon", "penalty"});
  detail::get(j, ctx, "opt_tol", n.opt_tol);
  detail::get(j, ctx, "integ_tol", n.integ_tol);
  detail::get(j, ctx, "quad_dtau", n.quad_dtau);
  detail::get(j, ctx, "fd_step", n.fd_step);
  detail::get(j, ctx, "max_iter", n.max_iter);
  if (j.contains("horizon")) {
    if (j.at("horizon").is_null()) n.horizon.reset();
    else {
      double h = 0.0;
      detail::get(j, ctx, "horizon", h);
      n.horizon = h;
    }
  }
  detail::get(j, ctx, "penalty", n.penalty);
}

inline void load(const json& j, ControlChoice& c, const std::string& ctx = "control") {
  detail::only(j, ctx, {"kind", "nc", "value", "nodes"});
  if (j.contains("kind")) {
    std::string k;
    detail::get(j, ctx, "kind", k);
    c.kind = shooting::parse_control_kind(k);
  }
  detail::get_size(j, ctx, "nc", c.n_c);
  detail::get(j, ctx, "value", c.value);
  detail::get(j, ctx, "nodes", c.nodes);
}

inline RunConfig preset(const std::string& name);

/// Overlay a run configuration document. A string "problem" selects a
/// preset first; every other field is applied on top of it.
inline void load(const json& j, RunConfig& rc) {
  detail::only(j, "", {"problem", "model", "method", "collocation", "sim", "nlp", "control", "setpoints", "out"});
  if (j.contains("problem")) {
    const auto& p = j.at("problem");
    if (p.is_string()) rc = preset(p.get<std::string>());
    else load(p, rc.spec, "problem");
  }
  if (j.contains("model")) load(j.at("model"), rc.spec.model, "model");
  if (j.contains("method")) {
    std::string m;
    detail::get(j, "", "method", m);
    rc.method = parse_method(m);
  }
  if (j.contains("collocation")) load(j.at("collocation"), rc.sim.colloc, "collocation");
  if (j.contains("sim")) load(j.at("sim"), rc.sim, "sim");
  if (j.contains("nlp")) load(j.at("nlp"), rc.nlp, "nlp");
  if (j.contains("control")) load(j.at("control"), rc.control, "control");
  detail::get(j, "", "setpoints", rc.setpoints);
  detail::get(j, "", "out", rc.out);
}

inline json parse_json_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("config", "cannot open '" + file + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("malformed JSON: ") + e.what());
  }
}

inline model::ModelParams load_model_params(const json& j) {
  model::ModelParams p;
  load(j, p);
  p.validate();
  return p;
}

inline ocp::OcpSpec load_ocp_spec(const json& j) {
  ocp::OcpSpec s;
  load(j, s);
  s.validate();
  return s;
}

inline RunConfig load_run_config(const json& j) {
  RunConfig rc;
  load(j, rc);
  rc.validate();
  return rc;
}

// ---- presets ---------------------------------------------------------------

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"problem1", "problem2", "problem3", "problem4"};
  return names;
}

/**
 * problem1: minimum thawing time. problem2: average temperature rising at
 * 0.04. problem3: front moving at -0.1 (index-n tracking). problem4: the
 * velocity sweep around the feasibility threshold.
 */
inline RunConfig preset(const std::string& name) {
  RunConfig rc;
  rc.problem = name;
  if (name == "problem1") {
    rc.spec.objective = ocp::MinTime{};
    rc.control = {shooting::ControlKind::PiecewiseConstant, 4, 1.0, {}};
  } else if (name == "problem2") {
    rc.spec.objective = ocp::TrackTemperatureRate{0.04};
    rc.sim.backend = ocp::Backend::Collocation;
    rc.sim.colloc.d_tau = 0.12;
    rc.nlp.horizon = 7.5;
    rc.control = {shooting::ControlKind::PiecewiseLinear, 16, 0.5, {}};
  } else if (name == "problem3") {
    rc.spec.objective = ocp::TrackInterfaceVelocity{-0.1};
    rc.sim.colloc.d_tau = 0.37;
    rc.control = {shooting::ControlKind::PiecewiseLinear, 12, 0.5, {}};
  } else if (name == "problem4") {
    rc.spec.objective = ocp::TrackInterfaceVelocity{-0.1};
    rc.sim.colloc.d_tau = 0.37;
    rc.control = {shooting::ControlKind::PiecewiseLinear, 12, 0.5, {}};
    rc.setpoints = {-0.05, -0.08, -0.1, -0.15};
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("preset", "unknown preset '" + name + "' (known: " + known + ")");
  }
  return rc;
}

/// The spec of rc with its tracking setpoint replaced (sweeps).
inline ocp::OcpSpec with_setpoint(const ocp::OcpSpec& spec, double sp) {
  ocp::OcpSpec s = spec;
  if (std::holds_alternative<ocp::TrackTemperatureRate>(s.objective)) s.objective = ocp::TrackTemperatureRate{sp};
  else if (std::holds_alternative<ocp::TrackInterfaceVelocity>(s.objective)) s.objective = ocp::TrackInterfaceVelocity{sp};
  else throw ConfigError("setpoints", "a minimum-time problem has no setpoint to sweep");
  return s;
}

// ---- echo ------------------------------------------------------------------

inline json to_json(const model::ModelParams& p) {
  return {{"n", p.n},
          {"stefan_number", p.stefan_number},
          {"alpha_ratio", p.alpha_ratio},
          {"k_ratio", p.k_ratio},
          {"biot", p.biot},
          {"wall_ratio", p.wall_ratio},
          {"eps_front", p.eps_front},
          {"theta_max", p.theta_max}};
}

inline json to_json(const ocp::Objective& o) {
  json j{{"kind", ocp::objective_kind(o)}};
  if (ocp::is_tracking(o)) j["setpoint"] = ocp::setpoint_of(o);
  return j;
}

inline json to_json(const ocp::OcpSpec& s) {
  json h;
  if (auto f = std::get_if<ocp::FixedHorizon>(&s.horizon)) h = {{"kind", "fixed"}, {"tau_f", f->tau_f}};
  else h = {{"kind", "stop_on_melt"}};
  return {{"objective", to_json(s.objective)},
          {"control_bounds", {s.control_bounds.lo, s.control_bounds.hi}},
          {"horizon", h},
          {"model", to_json(s.model)},
          {"theta_b_guess", s.theta_b_guess},
          {"average", {{"include_wall", s.average.include_wall}, {"area_weighted", s.average.area_weighted}}},
          {"max_horizon", s.max_horizon}};
}

inline json to_json(const RunConfig& rc) {
  json j;
  if (!rc.problem.empty()) j["preset"] = rc.problem;
  j["problem"] = to_json(rc.spec);
  j["method"] = to_string(rc.method);
  j["collocation"] = {{"d_tau", rc.sim.colloc.d_tau},
                      {"nodes", rc.sim.colloc.nodes},
                      {"newton_tol", rc.sim.colloc.newton_tol},
                      {"newton_max_iter", rc.sim.colloc.newton_max_iter},
                      {"damping", rc.sim.colloc.damping}};
  j["sim"] = {{"backend", to_string(rc.sim.backend)},
              {"bdf_tol", rc.sim.bdf_tol},
              {"max_switches", rc.sim.max_switches},
              {"switch_margin", rc.sim.switch_margin},
              {"d_tau_sample", rc.sim.d_tau_sample}};
  j["nlp"] = {{"opt_tol", rc.nlp.opt_tol},   {"integ_tol", rc.nlp.integ_tol}, {"quad_dtau", rc.nlp.quad_dtau},
              {"fd_step", rc.nlp.fd_step},   {"max_iter", rc.nlp.max_iter},   {"penalty", rc.nlp.penalty},
              {"horizon", rc.nlp.horizon ? json(*rc.nlp.horizon) : json(nullptr)}};
  j["control"] = {{"kind", shooting::to_string(rc.control.kind)}, {"nc", rc.control.n_c}, {"value", rc.control.value}};
  if (!rc.control.nodes.empty()) j["control"]["nodes"] = rc.control.nodes;
  j["setpoints"] = rc.setpoints;
  j["out"] = rc.out;
  return j;
}

}  // namespace stefan_oc::io
