#include "tslip/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>

#include <json.hpp>

namespace tslip {
namespace {

using json = nlohmann::json;

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("config: " + where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) {
      throw ConfigError("config: unknown key '" + where + "." + it.key() + "'");
    }
  }
}

double get_num(const json& j, const std::string& where, const char* key,
               double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number()) {
    throw ConfigError("config: '" + where + "." + key + "' must be a number");
  }
  return j[key].get<double>();
}

int get_int(const json& j, const std::string& where, const char* key,
            int dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number_integer()) {
    throw ConfigError("config: '" + where + "." + key + "' must be an integer");
  }
  return j[key].get<int>();
}

ModelParams parse_model(const json& j, const ModelParams& base) {
  check_keys(j, "model", {"m", "J", "l0", "r_H", "k", "c", "g", "vp_tan_clamp"});
  ModelParams p = base;
  p.m = get_num(j, "model", "m", p.m);
  p.J = get_num(j, "model", "J", p.J);
  p.l0 = get_num(j, "model", "l0", p.l0);
  p.r_H = get_num(j, "model", "r_H", p.r_H);
  p.k = get_num(j, "model", "k", p.k);
  p.c = get_num(j, "model", "c", p.c);
  p.g = get_num(j, "model", "g", p.g);
  p.vp_tan_clamp = get_num(j, "model", "vp_tan_clamp", p.vp_tan_clamp);
  if (p.m <= 0 || p.J <= 0 || p.l0 <= 0 || p.k <= 0 || p.g <= 0) {
    throw ConfigError("config: model parameters must be positive");
  }
  if (p.c < 0) throw ConfigError("config: model.c must be non-negative");
  return p;
}

TerrainSpec parse_terrain(const json& j, const TerrainSpec& base) {
  check_keys(j, "terrain", {"kind", "y0", "dy_step", "at_step", "dy_gnd"});
  TerrainSpec t = base;
  if (j.contains("kind")) {
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "level") {
      t.kind = TerrainSpec::Kind::Level;
    } else if (kind == "step_down") {
      t.kind = TerrainSpec::Kind::SingleStepDown;
    } else if (kind == "decline") {
      t.kind = TerrainSpec::Kind::ConstantDecline;
    } else {
      throw ConfigError("config: terrain.kind must be level|step_down|decline");
    }
  }
  t.y0 = get_num(j, "terrain", "y0", t.y0);
  t.dy_step = get_num(j, "terrain", "dy_step", t.dy_step);
  t.at_step = get_int(j, "terrain", "at_step", t.at_step);
  t.dy_gnd = get_num(j, "terrain", "dy_gnd", t.dy_gnd);
  if (t.kind == TerrainSpec::Kind::SingleStepDown && t.at_step < 1) {
    throw ConfigError("config: terrain.at_step must be >= 1");
  }
  return t;
}

GaitOptions parse_gait(const json& j, const GaitOptions& base) {
  check_keys(j, "gait", {"n_steps", "convergence_tol", "period_max"});
  GaitOptions g = base;
  g.n_steps = get_int(j, "gait", "n_steps", g.n_steps);
  g.convergence_tol = get_num(j, "gait", "convergence_tol", g.convergence_tol);
  g.period_max = get_int(j, "gait", "period_max", g.period_max);
  if (g.n_steps < 1) throw ConfigError("config: gait.n_steps must be >= 1");
  return g;
}

IntegratorSettings parse_integrator(const json& j,
                                    const IntegratorSettings& base) {
  check_keys(j, "integrator",
             {"rel_tol", "abs_tol", "max_step", "event_tol", "max_step_time"});
  IntegratorSettings s = base;
  s.rel_tol = get_num(j, "integrator", "rel_tol", s.rel_tol);
  s.abs_tol = get_num(j, "integrator", "abs_tol", s.abs_tol);
  s.max_step = get_num(j, "integrator", "max_step", s.max_step);
  s.event_tol = get_num(j, "integrator", "event_tol", s.event_tol);
  s.max_step_time = get_num(j, "integrator", "max_step_time", s.max_step_time);
  if (s.rel_tol <= 0 || s.abs_tol <= 0 || s.max_step <= 0) {
    throw ConfigError("config: integrator tolerances must be positive");
  }
  return s;
}

ControllerGains parse_gains(const json& j) {
  check_keys(j, "controller.gains",
             {"k_y", "k_xdot0", "k_xdot", "k_theta", "k_thetabar", "xdot_des",
              "theta_c_des", "r_vp_des", "theta_vp_des", "k_rvp", "k_thetavp",
              "r_vp_off", "theta_vp_off"});
  ControllerGains g;
  g.k_y = get_num(j, "gains", "k_y", g.k_y);
  g.k_xdot0 = get_num(j, "gains", "k_xdot0", g.k_xdot0);
  g.k_xdot = get_num(j, "gains", "k_xdot", g.k_xdot);
  g.k_theta = get_num(j, "gains", "k_theta", g.k_theta);
  g.k_thetabar = get_num(j, "gains", "k_thetabar", g.k_thetabar);
  g.xdot_des = get_num(j, "gains", "xdot_des", g.xdot_des);
  g.theta_c_des = get_num(j, "gains", "theta_c_des", g.theta_c_des);
  g.r_vp_des = get_num(j, "gains", "r_vp_des", g.r_vp_des);
  g.theta_vp_des = get_num(j, "gains", "theta_vp_des", g.theta_vp_des);
  g.k_rvp = get_num(j, "gains", "k_rvp", g.k_rvp);
  g.k_thetavp = get_num(j, "gains", "k_thetavp", g.k_thetavp);
  g.r_vp_off = get_num(j, "gains", "r_vp_off", g.r_vp_off);
  g.theta_vp_off = get_num(j, "gains", "theta_vp_off", g.theta_vp_off);
  return g;
}

VpConfig parse_vp(const json& j) {
  check_keys(j, "controller.vp0", {"r_vp", "theta_vp", "frame"});
  VpConfig v;
  v.r_vp = get_num(j, "vp0", "r_vp", 0.0);
  v.theta_vp = get_num(j, "vp0", "theta_vp", 0.0);
  const std::string frame =
      j.contains("frame") ? j["frame"].get<std::string>() : "world";
  if (frame == "body") {
    v.frame = VpFrame::BodyAligned;
  } else if (frame == "world") {
    v.frame = VpFrame::WorldVertical;
  } else {
    throw ConfigError("config: vp0.frame must be 'body' or 'world'");
  }
  return v;
}

ControllerSpec parse_controller(const json& j) {
  check_keys(j, "controller",
             {"cell", "gains", "theta_td0", "vp0", "apex0", "damping"});
  ControllerSpec spec;
  if (j.contains("cell")) {
    const json& jc = j["cell"];
    check_keys(jc, "controller.cell", {"speed", "grade", "vp_side"});
    CellRef ref;
    ref.speed = get_num(jc, "cell", "speed", 0.0);
    ref.grade = get_num(jc, "cell", "grade", 0.0);
    const std::string side =
        jc.contains("vp_side") ? jc["vp_side"].get<std::string>() : "B";
    if (side != "A" && side != "B") {
      throw ConfigError("config: controller.cell.vp_side must be 'A' or 'B'");
    }
    ref.vp_side = side[0];
    spec.cell = ref;
  }
  if (j.contains("gains")) spec.gains = parse_gains(j["gains"]);
  if (j.contains("theta_td0")) {
    spec.theta_td0 = get_num(j, "controller", "theta_td0", 0.0);
  }
  if (j.contains("vp0")) spec.vp0 = parse_vp(j["vp0"]);
  if (j.contains("apex0")) {
    const json& ja = j["apex0"];
    check_keys(ja, "controller.apex0", {"h", "xdot", "theta", "thetadot"});
    ApexState a;
    a.h = get_num(ja, "apex0", "h", 1.0);
    a.xdot = get_num(ja, "apex0", "xdot", 0.0);
    a.theta = get_num(ja, "apex0", "theta", 0.0);
    a.thetadot = get_num(ja, "apex0", "thetadot", 0.0);
    spec.apex0 = a;
  }
  if (j.contains("damping")) {
    spec.damping = get_num(j, "controller", "damping", 0.0);
  }
  if (!spec.cell && (!spec.gains || !spec.theta_td0 || !spec.vp0 || !spec.apex0)) {
    throw ConfigError(
        "config: controller needs either a cell reference or explicit "
        "gains, theta_td0, vp0, and apex0");
  }
  return spec;
}

ExperimentConfig parse_experiment(const json& j, const std::string& where) {
  check_keys(j, where,
             {"name", "model", "terrain", "gait", "integrator", "controller"});
  ExperimentConfig e;
  if (j.contains("name")) e.name = j["name"].get<std::string>();
  if (j.contains("model")) e.model = parse_model(j["model"], e.model);
  if (j.contains("terrain")) e.terrain = parse_terrain(j["terrain"], e.terrain);
  if (j.contains("gait")) e.gait = parse_gait(j["gait"], e.gait);
  if (j.contains("integrator")) {
    e.integrator = parse_integrator(j["integrator"], e.integrator);
  }
  if (!j.contains("controller")) {
    throw ConfigError("config: " + where + " needs a controller section");
  }
  e.controller = parse_controller(j["controller"]);
  return e;
}

json read_root(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json root;
  try {
    in >> root;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config: root must be an object");
  if (!root.contains("schema_version") ||
      !root["schema_version"].is_number_integer() ||
      root["schema_version"].get<int>() != 1) {
    throw ConfigError("config: schema_version must be 1");
  }
  return root;
}

}  // namespace

std::vector<ExperimentConfig> load_experiments(const std::string& path) {
  const json root = read_root(path);
  std::vector<ExperimentConfig> out;
  if (root.contains("experiments")) {
    check_keys(root, "root", {"schema_version", "gain_table", "experiments"});
    if (!root["experiments"].is_array() || root["experiments"].empty()) {
      throw ConfigError("config: experiments must be a non-empty array");
    }
    int idx = 0;
    for (const json& je : root["experiments"]) {
      out.push_back(
          parse_experiment(je, "experiments[" + std::to_string(idx) + "]"));
      ++idx;
    }
  } else {
    json trimmed = root;
    trimmed.erase("schema_version");
    if (trimmed.contains("gain_table")) trimmed.erase("gain_table");
    out.push_back(parse_experiment(trimmed, "root"));
  }
  return out;
}

std::string config_gain_table(const std::string& path) {
  const json root = read_root(path);
  if (!root.contains("gain_table")) return "";
  if (!root["gain_table"].is_string()) {
    throw ConfigError("config: gain_table must be a string path");
  }
  return root["gain_table"].get<std::string>();
}

}  // namespace tslip
