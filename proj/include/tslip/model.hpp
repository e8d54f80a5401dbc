#pragma once

#include <array>

#include "tslip/vec2.hpp"

// Trunk spring-loaded inverted pendulum (TSLIP): a rigid trunk carrying all
// mass and rotational inertia, plus a massless prismatic spring-damper leg
// attached at a hip point offset from the CoM along the trunk axis.
//
// Conventions used everywhere in this library (defined here, only here):
//  * World frame: x forward (direction of travel), y up, angles CCW positive.
//  * theta_C: trunk pitch, measured from the world vertical; 0 = upright.
//    The trunk axis unit vector (hip -> CoM -> head) is
//    (-sin theta_C, cos theta_C); positive theta_C leans the trunk backward.
//  * hip = CoM - r_H * trunk_axis; positive r_H puts the hip below the CoM.
//  * theta_L: leg angle measured from the ground plane such that the
//    foot->hip unit vector is (-cos theta_L, sin theta_L).  theta_L = pi/2 is
//    a vertical leg; at touch-down the foot is ahead of the hip, so
//    theta_L < pi/2 and a larger theta_L means a more vertical leg.
//  * Ground reaction force (GRF) acts on the foot contact point.  The axial
//    component acts along foot->hip, positive pushing the body away from the
//    ground.  The tangential component is f_t * perp(foot->hip unit).
//  * tau_H: hip torque exerted on the trunk, CCW positive.  The reaction
//    -tau_H acts on the massless leg and is what generates the tangential
//    GRF component.

namespace tslip {

struct ModelParams {
  double m = 80.0;     ///< trunk mass [kg]
  double J = 4.58;     ///< trunk pitch inertia about the CoM [kg m^2]
  double l0 = 1.0;     ///< leg rest length [m]
  double r_H = 0.1;    ///< CoM-to-hip offset along the trunk axis [m]
  double k = 20.0e3;   ///< leg spring stiffness [N/m]
  double c = 0.0;      ///< bilinear leg damping coefficient [N s/m^2]
  double g = 9.81;     ///< gravitational acceleration [m/s^2]

  /// |cross/dot| bound for the virtual-point torque map; beyond it the
  /// tangential force is clamped and the sample flagged (near-singular
  /// geometry where the leg is almost perpendicular to the foot->VP line).
  double vp_tan_clamp = 1.0e3;
};

/// Trunk state: CoM position, pitch, and their rates.
struct BodyState {
  double x = 0.0;          ///< CoM horizontal position [m]
  double y = 0.0;          ///< CoM height [m]
  double theta = 0.0;      ///< trunk pitch from vertical, CCW [rad]
  double xdot = 0.0;       ///< [m/s]
  double ydot = 0.0;       ///< [m/s]
  double thetadot = 0.0;   ///< [rad/s]

  Vec2 com() const { return {x, y}; }
  Vec2 com_vel() const { return {xdot, ydot}; }
};

/// Frame in which the virtual point is anchored relative to the CoM.
enum class VpFrame {
  BodyAligned,    ///< rotates with the trunk (VP_A gaits)
  WorldVertical,  ///< fixed to the world vertical (VP_B gaits)
};

/// Virtual point placement.  The VP sits at radius r_vp from the CoM along a
/// direction at angle theta_vp from the frame's vertical axis (CCW).
/// Positive r_vp is above the CoM, negative below.
struct VpConfig {
  double r_vp = 0.0;      ///< signed radius [m]
  double theta_vp = 0.0;  ///< angular offset from the frame vertical [rad]
  VpFrame frame = VpFrame::WorldVertical;
};

/// Flat integrator state layout: (x, y, theta, xdot, ydot, thetadot).
using StateVec = std::array<double, 6>;

inline StateVec pack(const BodyState& s) {
  return {s.x, s.y, s.theta, s.xdot, s.ydot, s.thetadot};
}

inline BodyState unpack(const StateVec& v) {
  BodyState s;
  s.x = v[0];
  s.y = v[1];
  s.theta = v[2];
  s.xdot = v[3];
  s.ydot = v[4];
  s.thetadot = v[5];
  return s;
}

/// Trunk axis unit vector (points from hip toward head).
inline Vec2 trunk_axis(double theta_c) {
  return {-std::sin(theta_c), std::cos(theta_c)};
}

/// Hip position for a given trunk state.
inline Vec2 hip_point(const BodyState& s, const ModelParams& p) {
  return s.com() - p.r_H * trunk_axis(s.theta);
}

/// Hip velocity (trunk is rigid, so the hip point co-rotates).
inline Vec2 hip_velocity(const BodyState& s, const ModelParams& p) {
  return s.com_vel() + s.thetadot * perp(hip_point(s, p) - s.com());
}

/// Virtual point location for a given trunk state.
inline Vec2 vp_point(const BodyState& s, const VpConfig& vp) {
  const double base = (vp.frame == VpFrame::BodyAligned) ? s.theta : 0.0;
  const double a = base + vp.theta_vp;
  return s.com() + vp.r_vp * Vec2{-std::sin(a), std::cos(a)};
}

/// Foot target during flight: the leg is held at rest length at the
/// commanded touch-down angle, attached to the (moving) hip.
inline Vec2 flight_foot(const BodyState& s, const ModelParams& p,
                        double theta_l_td) {
  return hip_point(s, p) +
         p.l0 * Vec2{std::cos(theta_l_td), -std::sin(theta_l_td)};
}

}  // namespace tslip
