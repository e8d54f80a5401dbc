#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tslip/analysis.hpp"
#include "tslip/export.hpp"
#include "tslip/svg.hpp"

namespace tslip::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

const char* status_name(StepStatus s) {
  switch (s) {
    case StepStatus::Ok:
      return "ok";
    case StepStatus::Fall:
      return "fall";
    case StepStatus::Timeout:
      return "timeout";
    default:
      return "numerical_failure";
  }
}

// Last completed step that actually has a stance phase; the analysis of a
// gait's "representative step" runs on this one.
const StepRecord* representative_step(const GaitResult& g) {
  for (auto it = g.steps.rbegin(); it != g.steps.rend(); ++it) {
    if (it->step.status == StepStatus::Ok && !it->step.degenerate_aerial &&
        it->step.t_to > it->step.t_td) {
      return &*it;
    }
  }
  return g.steps.empty() ? nullptr : &g.steps.back();
}

double mean_step_length(const GaitResult& g) {
  const int n = static_cast<int>(g.steps.size());
  const int from = std::max(0, n - 10);
  double acc = 0.0;
  int cnt = 0;
  for (int i = from; i < n; ++i) {
    const StepResult& s = g.steps[i].step;
    if (s.status != StepStatus::Ok) continue;
    acc += s.apex_out.x - s.apex_in.x;
    ++cnt;
  }
  return cnt > 0 ? acc / cnt : 0.0;
}

void plot_grf(const StepRecord& rec, const ModelParams& p,
              const std::string& path) {
  const GrfProfile prof = grf_profiles(rec.step, p);
  std::vector<Vec2> fy, fx;
  for (const GrfPoint& pt : prof.series) {
    fy.push_back({pt.t_pct, pt.fy_bw});
    fx.push_back({pt.t_pct, pt.fx_bw});
  }
  SvgPlot plot("Ground reaction force", "time [% step]", "force [BW]");
  plot.add_series("vertical", fy, "#c0392b");
  plot.add_series("horizontal", fx, "#2980b9");
  plot.add_hline(1.0, "#999");
  plot.add_hline(0.0, "#999");
  plot.set_xrange(0.0, 100.0);
  plot.save(path);
}

void plot_power(const StepRecord& rec, const ModelParams& p,
                const std::string& path) {
  const WorkBreakdown wb = work_decomposition(rec.step, p);
  std::vector<Vec2> sp, dp, hip;
  for (std::size_t i = 0; i < wb.t_pct.size(); ++i) {
    sp.push_back({wb.t_pct[i], wb.p_spring[i]});
    dp.push_back({wb.t_pct[i], wb.p_damper[i]});
    hip.push_back({wb.t_pct[i], wb.p_hip[i]});
  }
  SvgPlot plot("Leg power decomposition", "time [% step]", "power [W]");
  plot.add_series("spring", sp, "#27ae60");
  plot.add_series("damper", dp, "#c0392b");
  plot.add_series("hip", hip, "#8e44ad");
  plot.add_hline(0.0, "#999");
  plot.save(path);
}

void plot_convergence(const GaitResult& g, const std::string& path) {
  std::vector<Vec2> h, v, th;
  for (std::size_t k = 0; k < g.steps.size(); ++k) {
    const ApexState a = apex_state_of(g.steps[k]);
    h.push_back({static_cast<double>(k), a.h});
    v.push_back({static_cast<double>(k), a.xdot});
    th.push_back({static_cast<double>(k), a.theta});
  }
  SvgPlot plot("Apex state per step", "step", "h [m] / xdot [m/s] / theta [rad]");
  plot.add_series("apex height", h, "#2980b9");
  plot.add_series("forward speed", v, "#27ae60");
  plot.add_series("trunk pitch", th, "#c0392b");
  plot.save(path);
}

void plot_com(const GaitResult& g, const std::string& path) {
  const int n = static_cast<int>(g.steps.size());
  const int from = std::max(0, n - 8);
  std::vector<Vec2> com;
  std::vector<Vec2> ground;
  for (int k = from; k < n; ++k) {
    const StepRecord& rec = g.steps[k];
    for (const TrajectorySample& s : rec.step.trajectory) {
      com.push_back({s.state.x, s.state.y});
    }
    if (!rec.step.trajectory.empty()) {
      ground.push_back({rec.step.trajectory.front().state.x, rec.ground});
      ground.push_back({rec.step.trajectory.back().state.x, rec.ground});
    }
  }
  SvgPlot plot("CoM trajectory", "x [m]", "y [m]");
  plot.add_series("CoM", com, "#2980b9");
  plot.add_series("ground", ground, "#7f8c8d", 1.2, true);
  plot.save(path);
}

ordered_json model_json(const ModelParams& p) {
  ordered_json j;
  j["m"] = p.m;
  j["J"] = p.J;
  j["l0"] = p.l0;
  j["r_H"] = p.r_H;
  j["k"] = p.k;
  j["c"] = p.c;
  j["g"] = p.g;
  return j;
}

}  // namespace

ResolvedExperiment resolve(const ExperimentConfig& cfg,
                           const std::string& gain_table_path) {
  ResolvedExperiment exp;
  exp.name = cfg.name;
  exp.params = cfg.model;
  exp.terrain = cfg.terrain;
  exp.gait = cfg.gait;
  exp.integrator = cfg.integrator;

  const ControllerSpec& spec = cfg.controller;
  if (spec.cell) {
    if (gain_table_path.empty()) {
      throw ConfigError("no gain table available for controller.cell");
    }
    const GainTable table = load_gain_table(gain_table_path);
    const auto cell = find_cell(table, spec.cell->speed, spec.cell->grade,
                                spec.cell->vp_side);
    if (!cell) {
      std::ostringstream os;
      os << "gain table has no cell (speed=" << spec.cell->speed
         << ", grade=" << spec.cell->grade << ", side=" << spec.cell->vp_side
         << ")";
      throw ConfigError(os.str());
    }
    exp.cell = *cell;
  } else {
    exp.cell.gains = *spec.gains;
    exp.cell.theta_td0 = *spec.theta_td0;
    exp.cell.vp0 = *spec.vp0;
    exp.cell.apex0 = *spec.apex0;
    exp.cell.c = cfg.model.c;
    exp.cell.speed = spec.gains->xdot_des;
    exp.cell.vp_side = spec.vp0->r_vp >= 0.0 ? 'A' : 'B';
  }
  if (spec.gains && spec.cell) exp.cell.gains = *spec.gains;
  if (spec.theta_td0) exp.cell.theta_td0 = *spec.theta_td0;
  if (spec.vp0) exp.cell.vp0 = *spec.vp0;
  if (spec.apex0) exp.cell.apex0 = *spec.apex0;
  if (spec.damping) exp.cell.c = *spec.damping;
  exp.params.c = exp.cell.c;
  return exp;
}

ExperimentOutcome run_experiment(const ResolvedExperiment& exp,
                                 const std::string& out_dir, bool quiet) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  ExperimentOutcome out;
  out.name = exp.name;

  const int sd = exp.terrain.kind == TerrainSpec::Kind::SingleStepDown
                     ? exp.terrain.at_step
                     : -1;
  const ApexController ctrl(exp.cell.gains, cell_controls(exp.cell), sd);
  const ControlsFn fn = [&](int k, const std::vector<StepRecord>& done) {
    return ctrl.controls_for_step(k, done);
  };
  out.gait = simulate_gait(cell_apex(exp.cell, ground_level(exp.terrain, 0)),
                           fn, exp.params, exp.terrain, exp.gait,
                           exp.integrator);
  out.converged =
      out.gait.status == StepStatus::Ok && out.gait.convergence.steady;
  out.exit_code = out.converged ? 0 : 2;

  write_trajectory_csv(out_dir + "/trajectory.csv", out.gait);
  write_steps_csv(out_dir + "/steps.csv", out.gait);

  ordered_json j;
  j["name"] = exp.name;
  j["status"] = status_name(out.gait.status);
  j["converged"] = out.converged;
  j["steps_completed"] = out.gait.steps.size();
  {
    ordered_json jc;
    jc["steady"] = out.gait.convergence.steady;
    jc["first_steady_step"] = out.gait.convergence.first_steady_step;
    jc["period"] = out.gait.convergence.period;
    jc["final_delta"] = out.gait.convergence.deltas.empty()
                            ? 0.0
                            : out.gait.convergence.deltas.back();
    j["convergence"] = jc;
  }

  const StepRecord* rep = representative_step(out.gait);
  if (!out.gait.steps.empty()) {
    const ApexState last = apex_state_of(out.gait.steps.back());
    ordered_json ja;
    ja["h"] = last.h;
    ja["xdot"] = last.xdot;
    ja["theta"] = last.theta;
    ja["thetadot"] = last.thetadot;
    j["apex_last"] = ja;
    const StepControls& ctl = out.gait.steps.back().step.controls;
    ordered_json jl;
    jl["theta_td"] = ctl.theta_td;
    jl["r_vp"] = ctl.vp.r_vp;
    jl["theta_vp"] = ctl.vp.theta_vp;
    jl["frame"] = ctl.vp.frame == VpFrame::BodyAligned ? "body" : "world";
    j["controls_last"] = jl;
  }

  try {
    j["duty_factor"] = duty_factor(out.gait.steps);
  } catch (const NoStanceError&) {
    j["duty_factor"] = nullptr;
  }

  if (rep && rep->step.t_to > rep->step.t_td) {
    const GrfProfile prof = grf_profiles(rep->step, exp.params);
    ordered_json jg;
    jg["peak_vgrf_bw"] = prof.peak_vgrf_bw;
    jg["t_peak_vgrf_pct"] = prof.t_peak_vgrf_pct;
    jg["stance_begin_pct"] = prof.stance_begin_pct;
    jg["stance_end_pct"] = prof.stance_end_pct;
    jg["peak_brake_bw"] = prof.peak_brake_bw;
    jg["peak_prop_bw"] = prof.peak_prop_bw;
    jg["brake_time_frac"] = prof.brake_time_frac;
    jg["prop_time_frac"] = prof.prop_time_frac;
    jg["vgrf_skew"] = prof.vgrf_skew;
    j["grf"] = jg;

    const Impulses imp = impulses(rep->step, exp.params);
    ordered_json ji;
    ji["vertical"] = imp.vertical;
    ji["braking"] = imp.braking;
    ji["propulsion"] = imp.propulsion;
    ji["net_horizontal"] = imp.net_horizontal;
    j["impulses"] = ji;

    const WorkBreakdown wb = work_decomposition(rep->step, exp.params);
    ordered_json jw;
    jw["w_spring"] = wb.w_spring;
    jw["w_damper"] = wb.w_damper;
    jw["w_hip"] = wb.w_hip;
    jw["w_hip_neg"] = wb.w_hip_neg;
    jw["w_hip_pos"] = wb.w_hip_pos;
    jw["dE_kin"] = wb.dE_kin;
    jw["dE_pot"] = wb.dE_pot;
    jw["residual"] = wb.residual;
    j["work"] = jw;

    const EnergyAudit audit = energy_audit(rep->step, exp.params);
    ordered_json je;
    je["flight_drift_rel"] = audit.flight_drift_rel;
    je["residual"] = audit.residual;
    j["energy"] = je;

    try {
      const VpEstimate est = estimate_vp(rep->step, exp.params);
      ordered_json jv;
      jv["x"] = est.point.x;
      jv["y"] = est.point.y;
      jv["rms_residual"] = est.rms_residual;
      jv["n_lines"] = est.n_lines;
      j["vp_estimate"] = jv;
    } catch (const std::exception&) {
      j["vp_estimate"] = nullptr;
    }

    plot_grf(*rep, exp.params, out_dir + "/grf.svg");
    plot_power(*rep, exp.params, out_dir + "/power.svg");
  }

  if (exp.terrain.kind == TerrainSpec::Kind::ConstantDecline) {
    const double len = mean_step_length(out.gait);
    j["effective_slope_deg"] =
        len > 0.0 ? effective_slope(exp.terrain, len) * 180.0 / M_PI
                  : 0.0;
    j["mean_step_length"] = len;
  } else {
    j["effective_slope_deg"] = nullptr;
  }

  j["model"] = model_json(exp.params);
  {
    ordered_json jt;
    jt["kind"] = exp.terrain.kind == TerrainSpec::Kind::Level ? "level"
                 : exp.terrain.kind == TerrainSpec::Kind::SingleStepDown
                     ? "step_down"
                     : "decline";
    jt["y0"] = exp.terrain.y0;
    jt["dy_step"] = exp.terrain.dy_step;
    jt["at_step"] = exp.terrain.at_step;
    jt["dy_gnd"] = exp.terrain.dy_gnd;
    j["terrain"] = jt;
  }

  std::ofstream js(out_dir + "/summary.json");
  js << j.dump(2) << "\n";
  js.close();

  if (!out.gait.steps.empty()) {
    plot_convergence(out.gait, out_dir + "/convergence.svg");
    plot_com(out.gait, out_dir + "/com.svg");
  }

  if (!quiet) {
    std::printf("%-28s %-8s steps=%-3zu converged=%s period=%d\n",
                exp.name.c_str(), status_name(out.gait.status),
                out.gait.steps.size(), out.converged ? "yes" : "no",
                out.gait.convergence.period);
  }
  return out;
}

std::string aggregate_header() {
  return "name,status,converged,steps,period,final_delta,duty,apex_h,"
         "apex_xdot,apex_theta,theta_td,r_vp,peak_vgrf_bw,stance_begin_pct,"
         "w_damper,w_hip,slope_deg";
}

std::string aggregate_row(const ResolvedExperiment& exp,
                          const ExperimentOutcome& out) {
  std::ostringstream os;
  os << exp.name << ',' << status_name(out.gait.status) << ','
     << (out.converged ? 1 : 0) << ',' << out.gait.steps.size() << ','
     << out.gait.convergence.period << ','
     << format_double(out.gait.convergence.deltas.empty()
                          ? 0.0
                          : out.gait.convergence.deltas.back());
  double duty = 0.0;
  try {
    duty = duty_factor(out.gait.steps);
  } catch (const NoStanceError&) {
  }
  os << ',' << format_double(duty);
  if (!out.gait.steps.empty()) {
    const ApexState last = apex_state_of(out.gait.steps.back());
    const StepControls& ctl = out.gait.steps.back().step.controls;
    os << ',' << format_double(last.h) << ',' << format_double(last.xdot)
       << ',' << format_double(last.theta) << ','
       << format_double(ctl.theta_td) << ',' << format_double(ctl.vp.r_vp);
  } else {
    os << ",0,0,0,0,0";
  }
  const StepRecord* rep = representative_step(out.gait);
  if (rep && rep->step.t_to > rep->step.t_td) {
    const GrfProfile prof = grf_profiles(rep->step, exp.params);
    const WorkBreakdown wb = work_decomposition(rep->step, exp.params);
    os << ',' << format_double(prof.peak_vgrf_bw) << ','
       << format_double(prof.stance_begin_pct) << ','
       << format_double(wb.w_damper) << ',' << format_double(wb.w_hip);
  } else {
    os << ",0,0,0,0";
  }
  if (exp.terrain.kind == TerrainSpec::Kind::ConstantDecline) {
    const double len = mean_step_length(out.gait);
    os << ','
       << format_double(
              len > 0.0 ? effective_slope(exp.terrain, len) * 180.0 / M_PI
                        : 0.0);
  } else {
    os << ",0";
  }
  return os.str();
}

}  // namespace tslip::cli
