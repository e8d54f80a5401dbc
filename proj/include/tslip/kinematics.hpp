#pragma once

#include "tslip/model.hpp"
#include "tslip/vec2.hpp"

namespace tslip {

/// Stance-leg geometry derived from a trunk state and a fixed foot contact.
struct StanceGeometry {
  Vec2 foot;        ///< contact point [m]
  Vec2 hip;         ///< hip point [m]
  Vec2 vp;          ///< virtual point [m]
  Vec2 r_FH;        ///< foot -> hip [m]
  Vec2 r_FV;        ///< foot -> virtual point [m]
  Vec2 r_FC;        ///< foot -> CoM [m]
  double l = 0.0;        ///< leg length |r_FH| [m]
  double ldot = 0.0;     ///< leg length rate [m/s]
  double theta_l = 0.0;  ///< leg angle from ground plane [rad], see model.hpp
  double alpha_dot = 0.0;  ///< polar rate of the foot->hip direction [rad/s]
};

/// Pure geometry: no force law involved.  Requires l > 0.
StanceGeometry leg_kinematics(const BodyState& s, const Vec2& foot,
                              const ModelParams& p, const VpConfig& vp);

}  // namespace tslip
