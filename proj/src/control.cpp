#include "tslip/control.hpp"

#include <algorithm>
#include <cmath>

#include "tslip/gait.hpp"

namespace tslip {

double next_leg_angle(double theta_td_prev, const ApexObservation& obs,
                      const ControllerGains& g) {
  double th = theta_td_prev;
  th += g.k_y * (obs.apex_height - obs.prev_apex_height);
  th += g.k_xdot0 * (g.xdot_des - obs.xdot);
  th += g.k_xdot * (obs.xdot - obs.prev_xdot);
  th += g.k_theta * std::abs(g.theta_c_des - obs.theta);
  th += g.k_thetabar * (g.theta_c_des - obs.theta_mean_stance);

  constexpr double kMargin = 1e-6;
  return std::clamp(th, kMargin, M_PI - kMargin);
}

VpConfig next_vp(const VpConfig& vp_prev, const ApexObservation& obs,
                 const ControllerGains& g, bool at_step_down) {
  VpConfig v = vp_prev;
  if (at_step_down) {
    v.r_vp = vp_prev.r_vp + g.r_vp_off;
    v.theta_vp = vp_prev.theta_vp + g.theta_vp_off;
    return v;
  }
  const double target = std::max(
      0.0, std::abs(g.r_vp_des) - g.k_rvp * std::abs(obs.dtheta_dot_stance));
  const double mag = 0.5 * (std::abs(vp_prev.r_vp) + target);
  double sign = 1.0;
  if (g.r_vp_des != 0.0) {
    sign = g.r_vp_des > 0.0 ? 1.0 : -1.0;
  } else if (vp_prev.r_vp < 0.0) {
    sign = -1.0;
  }
  v.r_vp = sign * mag;
  v.theta_vp = g.theta_vp_des + g.k_thetavp * (g.theta_c_des - obs.dtheta_stance);
  return v;
}

namespace {

const BodyState* event_state(const StepResult& s, EventKind a, EventKind b,
                             EventKind c) {
  for (const PhaseEvent& e : s.events) {
    if (e.kind == a || e.kind == b || e.kind == c) return &e.state;
  }
  return nullptr;
}

double mean_stance_pitch(const StepResult& s) {
  double area = 0.0, dur = 0.0;
  const TrajectorySample* prev = nullptr;
  for (const TrajectorySample& ts : s.trajectory) {
    if (ts.phase != Phase::Stance) {
      prev = nullptr;
      continue;
    }
    if (prev) {
      const double dt = ts.t - prev->t;
      area += 0.5 * (ts.state.theta + prev->state.theta) * dt;
      dur += dt;
    }
    prev = &ts;
  }
  return dur > 0.0 ? area / dur : 0.0;
}

}  // namespace

ApexObservation observe(const std::vector<StepRecord>& done) {
  ApexObservation obs;
  if (done.empty()) return obs;

  const StepRecord& last = done.back();
  obs.apex_height = last.step.apex_out.y - last.ground;
  obs.xdot = last.step.apex_out.xdot;
  obs.theta = last.step.apex_out.theta;

  if (done.size() >= 2) {
    const StepRecord& prev = done[done.size() - 2];
    obs.prev_apex_height = prev.step.apex_out.y - prev.ground;
    obs.prev_xdot = prev.step.apex_out.xdot;
    obs.dground = last.ground - prev.ground;
  } else {
    obs.prev_apex_height = obs.apex_height;
    obs.prev_xdot = obs.xdot;
  }

  const BodyState* td = event_state(last.step, EventKind::TouchDown,
                                    EventKind::TouchDown, EventKind::TouchDown);
  const BodyState* to =
      event_state(last.step, EventKind::TakeOffRestLength,
                  EventKind::TakeOffZeroGrf, EventKind::TakeOffZeroAccel);
  if (td && to) {
    obs.dtheta_dot_stance = to->thetadot - td->thetadot;
    obs.dtheta_stance = to->theta - td->theta;
  }
  obs.theta_mean_stance = mean_stance_pitch(last.step);
  return obs;
}

StepControls ApexController::controls_for_step(
    int step_index, const std::vector<StepRecord>& done) const {
  if (step_index == 0 || done.empty()) return initial_;

  const ApexObservation obs = observe(done);
  const StepControls& prev = done.back().step.controls;

  StepControls c;
  c.theta_td = next_leg_angle(prev.theta_td, obs, gains_);
  c.vp = next_vp(prev.vp, obs, gains_, step_index == step_down_index_);
  return c;
}

}  // namespace tslip
