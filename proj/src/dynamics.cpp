#include "tslip/dynamics.hpp"

namespace tslip {

StanceDeriv stance_derivatives(const BodyState& s, const Vec2& foot,
                               const ModelParams& p, const VpConfig& vp) {
  StanceDeriv d;
  d.geom = leg_kinematics(s, foot, p, vp);
  d.forces = stance_forces(d.geom, p);

  const Vec2 acc = d.forces.f_total / p.m + Vec2{0.0, -p.g};
  const double theta_dd = grf_moment_about(s.com(), foot, d.forces.f_total) / p.J;

  d.dstate = {s.xdot, s.ydot, s.thetadot, acc.x, acc.y, theta_dd};
  return d;
}

StateVec flight_derivatives(const BodyState& s, const ModelParams& p) {
  return {s.xdot, s.ydot, s.thetadot, 0.0, -p.g, 0.0};
}

}  // namespace tslip
