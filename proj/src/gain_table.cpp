#include "tslip/gain_table.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace tslip {
namespace {

using ordered_json = nlohmann::ordered_json;

double num(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw GainTableError(std::string("gain table: missing number '") + key +
                         "'");
  }
  return j[key].get<double>();
}

ordered_json gains_to_json(const ControllerGains& g) {
  ordered_json j;
  j["k_y"] = g.k_y;
  j["k_xdot0"] = g.k_xdot0;
  j["k_xdot"] = g.k_xdot;
  j["k_theta"] = g.k_theta;
  j["k_thetabar"] = g.k_thetabar;
  j["xdot_des"] = g.xdot_des;
  j["theta_c_des"] = g.theta_c_des;
  j["r_vp_des"] = g.r_vp_des;
  j["theta_vp_des"] = g.theta_vp_des;
  j["k_rvp"] = g.k_rvp;
  j["k_thetavp"] = g.k_thetavp;
  j["r_vp_off"] = g.r_vp_off;
  j["theta_vp_off"] = g.theta_vp_off;
  return j;
}

ControllerGains gains_from_json(const ordered_json& j) {
  ControllerGains g;
  g.k_y = num(j, "k_y");
  g.k_xdot0 = num(j, "k_xdot0");
  g.k_xdot = num(j, "k_xdot");
  g.k_theta = num(j, "k_theta");
  g.k_thetabar = num(j, "k_thetabar");
  g.xdot_des = num(j, "xdot_des");
  g.theta_c_des = num(j, "theta_c_des");
  g.r_vp_des = num(j, "r_vp_des");
  g.theta_vp_des = num(j, "theta_vp_des");
  g.k_rvp = num(j, "k_rvp");
  g.k_thetavp = num(j, "k_thetavp");
  g.r_vp_off = num(j, "r_vp_off");
  g.theta_vp_off = num(j, "theta_vp_off");
  return g;
}

}  // namespace

GainTable load_gain_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GainTableError("gain table: cannot open " + path);
  ordered_json root;
  try {
    in >> root;
  } catch (const std::exception& e) {
    throw GainTableError(std::string("gain table: parse error: ") + e.what());
  }
  if (!root.contains("schema_version") ||
      root["schema_version"].get<int>() != 1) {
    throw GainTableError("gain table: unsupported schema_version");
  }

  GainTable table;
  for (const ordered_json& jc : root["cells"]) {
    GainCell c;
    c.speed = num(jc, "speed");
    c.grade = num(jc, "grade");
    const std::string side = jc.at("vp_side").get<std::string>();
    if (side != "A" && side != "B") {
      throw GainTableError("gain table: vp_side must be 'A' or 'B'");
    }
    c.vp_side = side[0];
    c.c = num(jc, "c");
    c.gains = gains_from_json(jc.at("gains"));
    c.theta_td0 = num(jc, "theta_td0");
    const ordered_json& jv = jc.at("vp0");
    c.vp0.r_vp = num(jv, "r_vp");
    c.vp0.theta_vp = num(jv, "theta_vp");
    const std::string frame = jv.at("frame").get<std::string>();
    if (frame == "body") {
      c.vp0.frame = VpFrame::BodyAligned;
    } else if (frame == "world") {
      c.vp0.frame = VpFrame::WorldVertical;
    } else {
      throw GainTableError("gain table: vp frame must be 'body' or 'world'");
    }
    const ordered_json& ja = jc.at("apex0");
    c.apex0.h = num(ja, "h");
    c.apex0.xdot = num(ja, "xdot");
    c.apex0.theta = num(ja, "theta");
    c.apex0.thetadot = num(ja, "thetadot");
    c.duty = num(jc, "duty");
    c.conv_delta = num(jc, "conv_delta");
    table.cells.push_back(c);
  }
  return table;
}

void save_gain_table(const std::string& path, const GainTable& table) {
  ordered_json root;
  root["schema_version"] = table.schema_version;
  root["cells"] = ordered_json::array();
  for (const GainCell& c : table.cells) {
    ordered_json jc;
    jc["speed"] = c.speed;
    jc["grade"] = c.grade;
    jc["vp_side"] = std::string(1, c.vp_side);
    jc["c"] = c.c;
    jc["gains"] = gains_to_json(c.gains);
    jc["theta_td0"] = c.theta_td0;
    ordered_json jv;
    jv["r_vp"] = c.vp0.r_vp;
    jv["theta_vp"] = c.vp0.theta_vp;
    jv["frame"] = c.vp0.frame == VpFrame::BodyAligned ? "body" : "world";
    jc["vp0"] = jv;
    ordered_json ja;
    ja["h"] = c.apex0.h;
    ja["xdot"] = c.apex0.xdot;
    ja["theta"] = c.apex0.theta;
    ja["thetadot"] = c.apex0.thetadot;
    jc["apex0"] = ja;
    jc["duty"] = c.duty;
    jc["conv_delta"] = c.conv_delta;
    root["cells"].push_back(jc);
  }
  std::ofstream out(path);
  if (!out) throw GainTableError("gain table: cannot write " + path);
  out << root.dump(2) << "\n";
}

std::optional<GainCell> find_cell(const GainTable& table, double speed,
                                  double grade, char vp_side) {
  for (const GainCell& c : table.cells) {
    if (c.vp_side == vp_side && std::abs(c.speed - speed) < 1e-9 &&
        std::abs(c.grade - grade) < 1e-9) {
      return c;
    }
  }
  return std::nullopt;
}

}  // namespace tslip
