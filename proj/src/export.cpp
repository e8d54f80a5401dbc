#include "tslip/export.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace tslip {

std::string format_double(double v) {
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

namespace {

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export: cannot write " + path);
  return out;
}

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

}  // namespace

void write_trajectory_csv(const std::string& path, const GaitResult& gait) {
  std::ofstream out = open_or_throw(path);
  out << "step,t,phase,x_c,y_c,theta_c,xdot_c,ydot_c,thetadot_c,"
         "f_x,f_y,f_sp,f_dp,tau_h,foot_x,foot_y,ground_y\n";
  double t0 = 0.0;
  for (std::size_t k = 0; k < gait.steps.size(); ++k) {
    const StepRecord& rec = gait.steps[k];
    const StepResult& s = rec.step;
    for (std::size_t i = 0; i < s.trajectory.size(); ++i) {
      if (k > 0 && i == 0) continue;  // duplicate of the previous apex row
      const TrajectorySample& ts = s.trajectory[i];
      const bool stance = ts.phase == Phase::Stance;
      out << k << ',' << format_double(t0 + ts.t) << ','
          << (stance ? "stance" : "flight") << ','
          << format_double(ts.state.x) << ',' << format_double(ts.state.y)
          << ',' << format_double(ts.state.theta) << ','
          << format_double(ts.state.xdot) << ',' << format_double(ts.state.ydot)
          << ',' << format_double(ts.state.thetadot) << ','
          << format_double(ts.forces.f_total.x) << ','
          << format_double(ts.forces.f_total.y) << ','
          << format_double(ts.forces.f_sp) << ','
          << format_double(ts.forces.f_dp) << ','
          << format_double(ts.forces.tau_h) << ','
          << format_double(stance ? s.foot.x : 0.0) << ','
          << format_double(stance ? s.foot.y : 0.0) << ','
          << format_double(rec.ground) << '\n';
    }
    t0 += s.step_time;
  }
}

void write_steps_csv(const std::string& path, const GaitResult& gait) {
  std::ofstream out = open_or_throw(path);
  out << "step,ground_y,apex_h,apex_xdot,apex_theta,apex_thetadot,theta_td,"
         "r_vp,theta_vp,t_td,t_to,step_time,duty,early_cutoff,degenerate,"
         "status\n";
  for (std::size_t k = 0; k < gait.steps.size(); ++k) {
    const StepRecord& rec = gait.steps[k];
    const StepResult& s = rec.step;
    const double duty =
        s.step_time > 0.0 ? (s.t_to - s.t_td) / (2.0 * s.step_time) : 0.0;
    out << k << ',' << format_double(rec.ground) << ','
        << format_double(s.apex_out.y - rec.ground) << ','
        << format_double(s.apex_out.xdot) << ','
        << format_double(s.apex_out.theta) << ','
        << format_double(s.apex_out.thetadot) << ','
        << format_double(s.controls.theta_td) << ','
        << format_double(s.controls.vp.r_vp) << ','
        << format_double(s.controls.vp.theta_vp) << ','
        << format_double(s.t_td) << ',' << format_double(s.t_to) << ','
        << format_double(s.step_time) << ',' << format_double(duty) << ','
        << (s.early_grf_cutoff ? 1 : 0) << ',' << (s.degenerate_aerial ? 1 : 0)
        << ',' << status_name(s.status) << '\n';
  }
}

}  // namespace tslip
