#pragma once

#include "tslip/model.hpp"
#include "tslip/step.hpp"

#include <vector>

namespace tslip {

/// Gains and setpoints of the apex-time discrete controllers.  Everything is
/// updated once per step, between apex and the next touch-down; controls for
/// a step therefore depend only on completed steps.
struct ControllerGains {
  // leg-angle update
  double k_y = 0.0;        ///< on apex-height change (terrain-compensated) [rad/m]
  double k_xdot0 = 0.0;    ///< on speed error vs setpoint [rad s/m]
  double k_xdot = 0.0;     ///< on apex-to-apex speed change [rad s/m]
  double k_theta = 0.0;    ///< on |trunk-angle error| at apex [-]
  double k_thetabar = 0.0; ///< on mean-stance trunk-angle error [-]
  double xdot_des = 0.0;   ///< target forward speed [m/s]
  double theta_c_des = 0.0;///< target trunk pitch [rad]

  // virtual-point adaptation
  double r_vp_des = 0.0;     ///< signed target VP radius [m]
  double theta_vp_des = 0.0; ///< base VP angle [rad]
  double k_rvp = 0.0;        ///< radius shrink per |trunk-rate change| [m s/rad]
  double k_thetavp = 0.0;    ///< VP-angle feedback on trunk-angle change [-]

  // one-shot anticipatory offsets applied at the step-down step
  double r_vp_off = 0.0;
  double theta_vp_off = 0.0;
};

/// Apex-time observations of the most recently completed step (and the one
/// before it, for differences).  Heights are measured above the ground level
/// of the step they belong to, which folds terrain drops out of the
/// height-change signal.
struct ApexObservation {
  double apex_height = 0.0;       ///< [m] above local ground
  double xdot = 0.0;              ///< [m/s] at apex
  double theta = 0.0;             ///< [rad] trunk pitch at apex
  double prev_apex_height = 0.0;  ///< previous apex, above its local ground
  double prev_xdot = 0.0;
  double dtheta_dot_stance = 0.0; ///< thetadot(take-off) - thetadot(touch-down)
  double dtheta_stance = 0.0;     ///< theta(take-off) - theta(touch-down)
  double theta_mean_stance = 0.0; ///< time-weighted mean pitch over stance
  double dground = 0.0;           ///< ground(last step) - ground(step before)
};

/// Discrete leg-angle update; result clamped into (0, pi).
double next_leg_angle(double theta_td_prev, const ApexObservation& obs,
                      const ControllerGains& g);

/// Discrete virtual-point update.  The radius law operates on the magnitude
/// (relaxing halfway toward the gated target each step) and reattaches the
/// sign of r_vp_des; at the step-down step both radius and angle instead get
/// the one-shot anticipatory offsets.
VpConfig next_vp(const VpConfig& vp_prev, const ApexObservation& obs,
                 const ControllerGains& g, bool at_step_down);

struct StepRecord;  // gait.hpp

/// Stateless controller: reads its own previous outputs from the gait
/// history, applies the two update laws.
class ApexController {
 public:
  ApexController(ControllerGains gains, StepControls initial,
                 int step_down_index = -1)
      : gains_(gains), initial_(initial), step_down_index_(step_down_index) {}

  StepControls controls_for_step(int step_index,
                                 const std::vector<StepRecord>& done) const;

  const ControllerGains& gains() const { return gains_; }
  const StepControls& initial() const { return initial_; }

 private:
  ControllerGains gains_;
  StepControls initial_;
  int step_down_index_ = -1;
};

/// Observation assembly used by ApexController; exposed for tests.
ApexObservation observe(const std::vector<StepRecord>& done);

}  // namespace tslip
