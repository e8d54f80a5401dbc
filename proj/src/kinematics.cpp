#include "tslip/kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace tslip {

StanceGeometry leg_kinematics(const BodyState& s, const Vec2& foot,
                              const ModelParams& p, const VpConfig& vp) {
  StanceGeometry g;
  g.foot = foot;
  g.hip = hip_point(s, p);
  g.vp = vp_point(s, vp);
  g.r_FH = g.hip - foot;
  g.r_FV = g.vp - foot;
  g.r_FC = s.com() - foot;
  g.l = g.r_FH.norm();
  if (!(g.l > 1e-9)) {
    throw std::domain_error("leg_kinematics: degenerate leg (hip at foot)");
  }
  // foot->hip = (-cos theta_l, sin theta_l)
  g.theta_l = std::atan2(g.r_FH.y, -g.r_FH.x);

  const Vec2 v_hip = hip_velocity(s, p);
  g.ldot = dot(g.r_FH, v_hip) / g.l;
  g.alpha_dot = cross(g.r_FH, v_hip) / (g.l * g.l);
  return g;
}

}  // namespace tslip
