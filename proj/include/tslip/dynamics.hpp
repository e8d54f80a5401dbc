#pragma once

#include "tslip/forces.hpp"
#include "tslip/kinematics.hpp"
#include "tslip/model.hpp"

namespace tslip {

/// Time derivative of the flat state vector plus the force breakdown that
/// produced it (forces are recorded along trajectories, so they are returned
/// rather than recomputed).
struct StanceDeriv {
  StateVec dstate;
  StanceGeometry geom;
  ForceBreakdown forces;
};

/// Stance dynamics: GRF at the fixed foot plus gravity.
///   m * a_com = f_total + m * g_vec
///   J * theta_ddot = cross(foot - com, f_total)
/// The hip torque is internal to the trunk+leg system, so the pitch equation
/// is just the GRF moment about the CoM.
StanceDeriv stance_derivatives(const BodyState& s, const Vec2& foot,
                               const ModelParams& p, const VpConfig& vp);

/// Ballistic flight: gravity only, pitch rate constant.
StateVec flight_derivatives(const BodyState& s, const ModelParams& p);

}  // namespace tslip
