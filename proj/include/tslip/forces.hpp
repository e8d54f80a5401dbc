#pragma once

#include "tslip/kinematics.hpp"
#include "tslip/model.hpp"

namespace tslip {

/// Ground reaction force decomposition at one stance instant.
///
/// f_sp and f_dp are the spring and damper contributions to the axial force,
/// positive pushing the body away from the foot along foot->hip.  f_t is the
/// tangential component along perp(foot->hip unit).  tau_h is the hip torque
/// on the trunk (CCW positive); the tangential GRF is its reaction through
/// the massless leg, f_t = -tau_h / l.
struct ForceBreakdown {
  Vec2 f_total;        ///< GRF acting on the foot [N]
  double f_sp = 0.0;   ///< axial spring force [N]
  double f_dp = 0.0;   ///< axial damper force [N]
  double f_ax = 0.0;   ///< f_sp + f_dp [N]
  double f_t = 0.0;    ///< tangential force [N]
  double tau_h = 0.0;  ///< hip torque on the trunk [N m]
  bool vp_clamped = false;  ///< tangential map hit the singularity clamp
};

/// Leg force law.  The axial force is a linear spring with a bilinear damper
/// (damping scales with compression, so the GRF is continuous at touch-down
/// where l = l0).  The tangential force redirects the total GRF so that its
/// line of action through the foot passes through the virtual point:
///   f_t = -f_ax * cross(r_FV, r_FH) / dot(r_FV, r_FH).
/// Near-singular geometry (|cross/dot| > vp_tan_clamp) is clamped and
/// flagged instead of blowing up.
ForceBreakdown stance_forces(const StanceGeometry& g, const ModelParams& p);

/// Moment of the GRF (applied at the foot) about an arbitrary point.
inline double grf_moment_about(const Vec2& point, const Vec2& foot,
                               const Vec2& f_total) {
  return cross(foot - point, f_total);
}

}  // namespace tslip
