#include <doctest.h>

#include <cmath>
#include <random>

#include "tslip/dynamics.hpp"
#include "tslip/forces.hpp"
#include "tslip/kinematics.hpp"
#include "tslip/model.hpp"

using namespace tslip;

namespace {

ModelParams base_params() {
  ModelParams p;
  p.m = 80.0;
  p.J = 4.58;
  p.l0 = 1.0;
  p.r_H = 0.1;
  p.k = 20.0e3;
  p.c = 0.0;
  p.g = 9.81;
  return p;
}

// Build a stance state from leg polar coordinates: foot at origin, leg at
// angle theta_l with length l, trunk pitched by theta_c.
BodyState stance_state(const ModelParams& p, double l, double theta_l,
                       double theta_c, const Vec2& v_com, double thetadot) {
  const Vec2 hip = l * Vec2{-std::cos(theta_l), std::sin(theta_l)};
  const Vec2 com = hip + p.r_H * trunk_axis(theta_c);
  BodyState s;
  s.x = com.x;
  s.y = com.y;
  s.theta = theta_c;
  s.xdot = v_com.x;
  s.ydot = v_com.y;
  s.thetadot = thetadot;
  return s;
}

}  // namespace

TEST_CASE("leg geometry: vertical leg, hip at CoM") {
  ModelParams p = base_params();
  p.r_H = 0.0;
  BodyState s;
  s.x = 0.0;
  s.y = 1.0;
  const Vec2 foot{0.0, 0.0};
  const StanceGeometry g = leg_kinematics(s, foot, p, {});
  CHECK(g.l == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.theta_l == doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(g.r_FC.x == doctest::Approx(0.0));
  CHECK(g.r_FC.y == doctest::Approx(1.0));
}

TEST_CASE("leg angle convention: foot ahead of hip gives theta_l < pi/2") {
  ModelParams p = base_params();
  p.r_H = 0.0;
  BodyState s;
  s.x = 0.0;
  s.y = 0.9;
  const Vec2 foot{0.35, 0.0};  // foot in front of the hip
  const StanceGeometry g = leg_kinematics(s, foot, p, {});
  CHECK(g.theta_l < M_PI / 2);
  CHECK(g.theta_l > 0.0);
  // r_FH must reconstruct from (l, theta_l)
  CHECK(g.r_FH.x ==
        doctest::Approx(-g.l * std::cos(g.theta_l)).epsilon(1e-12));
  CHECK(g.r_FH.y == doctest::Approx(g.l * std::sin(g.theta_l)).epsilon(1e-12));
}

TEST_CASE("virtual point placement in both frames") {
  BodyState s;
  s.x = 2.0;
  s.y = 1.1;

  VpConfig below;
  below.r_vp = -0.30;
  below.theta_vp = 0.0;
  below.frame = VpFrame::WorldVertical;

  for (double pitch : {0.0, 0.25, -0.4}) {
    s.theta = pitch;
    const Vec2 v = vp_point(s, below);
    CHECK(v.x == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(v.y == doctest::Approx(0.8).epsilon(1e-12));
  }

  VpConfig above;
  above.r_vp = 0.30;
  above.theta_vp = 0.0;
  above.frame = VpFrame::BodyAligned;

  s.theta = 0.0;
  Vec2 v = vp_point(s, above);
  CHECK(v.x == doctest::Approx(2.0));
  CHECK(v.y == doctest::Approx(1.4));
  s.theta = 0.3;  // rotates with the trunk
  v = vp_point(s, above);
  CHECK(v.x == doctest::Approx(2.0 - 0.3 * std::sin(0.3)).epsilon(1e-12));
  CHECK(v.y == doctest::Approx(1.1 + 0.3 * std::cos(0.3)).epsilon(1e-12));
}

TEST_CASE("hip point and hip velocity against finite differences") {
  ModelParams p = base_params();
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    BodyState s;
    s.x = U(rng);
    s.y = 1.0 + 0.2 * U(rng);
    s.theta = 0.5 * U(rng);
    s.xdot = 3.0 * U(rng);
    s.ydot = U(rng);
    s.thetadot = 2.0 * U(rng);

    const double dt = 1e-7;
    BodyState sp = s, sm = s;
    sp.x += s.xdot * dt;
    sp.y += s.ydot * dt;
    sp.theta += s.thetadot * dt;
    sm.x -= s.xdot * dt;
    sm.y -= s.ydot * dt;
    sm.theta -= s.thetadot * dt;
    const Vec2 fd = (hip_point(sp, p) - hip_point(sm, p)) / (2 * dt);
    const Vec2 hv = hip_velocity(s, p);
    CHECK(hv.x == doctest::Approx(fd.x).epsilon(1e-6));
    CHECK(hv.y == doctest::Approx(fd.y).epsilon(1e-6));
  }
}

TEST_CASE("leg length rate and sweep rate against finite differences") {
  ModelParams p = base_params();
  const Vec2 foot{0.1, 0.0};
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    BodyState s;
    s.x = 0.3 * U(rng);
    s.y = 0.95 + 0.1 * U(rng);
    s.theta = 0.4 * U(rng);
    s.xdot = 4.0 * U(rng);
    s.ydot = 1.5 * U(rng);
    s.thetadot = 2.0 * U(rng);

    const StanceGeometry g = leg_kinematics(s, foot, p, {});
    const double dt = 1e-7;
    BodyState sp = s, sm = s;
    sp.x += s.xdot * dt;
    sp.y += s.ydot * dt;
    sp.theta += s.thetadot * dt;
    sm.x -= s.xdot * dt;
    sm.y -= s.ydot * dt;
    sm.theta -= s.thetadot * dt;
    const StanceGeometry gp = leg_kinematics(sp, foot, p, {});
    const StanceGeometry gm = leg_kinematics(sm, foot, p, {});
    CHECK(g.ldot == doctest::Approx((gp.l - gm.l) / (2 * dt)).epsilon(1e-5));
    const double alpha_p = std::atan2(gp.r_FH.y, gp.r_FH.x);
    const double alpha_m = std::atan2(gm.r_FH.y, gm.r_FH.x);
    CHECK(g.alpha_dot ==
          doctest::Approx((alpha_p - alpha_m) / (2 * dt)).epsilon(1e-5));
  }
}

TEST_CASE("axial force: compressed vertical leg pushes up with k * dl") {
  ModelParams p = base_params();
  p.r_H = 0.0;
  BodyState s;
  s.y = 0.9;  // l = l0 - 0.1
  const Vec2 foot{0.0, 0.0};
  VpConfig vp;  // r_vp = 0: force through the CoM
  const StanceGeometry g = leg_kinematics(s, foot, p, vp);
  const ForceBreakdown f = stance_forces(g, p);
  CHECK(f.f_total.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(f.f_total.y == doctest::Approx(2000.0).epsilon(1e-12));
  CHECK(f.f_t == doctest::Approx(0.0));
  CHECK(f.tau_h == doctest::Approx(0.0));
}

TEST_CASE("bilinear damper vanishes at rest length (GRF continuous at TD)") {
  ModelParams p = base_params();
  p.c = 300.0;
  p.r_H = 0.0;
  BodyState s;
  s.y = 1.0;
  s.ydot = -1.3;  // compressing fast, but l = l0
  const StanceGeometry g = leg_kinematics(s, {0.0, 0.0}, p, {});
  const ForceBreakdown f = stance_forces(g, p);
  CHECK(std::abs(f.f_dp) < 1e-12);
  CHECK(std::abs(f.f_total.norm()) < 1e-12);
}

TEST_CASE("damper power is dissipative while the leg is compressed") {
  ModelParams p = base_params();
  p.c = 150.0;
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double l = 0.8 + 0.19 * std::abs(U(rng));
    const BodyState s = stance_state(p, l, 1.2 + 0.6 * U(rng), 0.3 * U(rng),
                                     {3 * U(rng), 2 * U(rng)}, U(rng));
    const StanceGeometry g = leg_kinematics(s, {0, 0}, p, {});
    const ForceBreakdown f = stance_forces(g, p);
    CHECK(f.f_dp * g.ldot <= 1e-12);  // power of the damper on the body
  }
}

TEST_CASE("total GRF line of action passes through the virtual point") {
  ModelParams p = base_params();
  p.c = 80.0;
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    VpConfig vp;
    vp.r_vp = 0.45 * U(rng);
    vp.theta_vp = 0.3 * U(rng);
    vp.frame = U(rng) > 0 ? VpFrame::BodyAligned : VpFrame::WorldVertical;
    const double l = 0.75 + 0.2 * std::abs(U(rng));
    const BodyState s = stance_state(p, l, M_PI / 2 + 0.5 * U(rng), 0.3 * U(rng),
                                     {4 * U(rng), 2 * U(rng)}, 1.5 * U(rng));
    const StanceGeometry g = leg_kinematics(s, {0, 0}, p, vp);
    const ForceBreakdown f = stance_forces(g, p);
    if (f.vp_clamped) continue;
    // moment about the VP of the GRF applied at the foot
    const double m_vp = grf_moment_about(g.vp, g.foot, f.f_total);
    CHECK(std::abs(m_vp) <= 1e-9 * f.f_total.norm() * p.l0 + 1e-12);
    // pitch moment about the CoM equals the moment computed via the VP arm
    const double m_com = grf_moment_about(s.com(), g.foot, f.f_total);
    const double m_via_vp = cross(g.vp - s.com(), f.f_total);
    CHECK(m_com == doctest::Approx(m_via_vp).epsilon(1e-9).scale(
                       std::abs(m_com) + 1.0));
  }
}

TEST_CASE("instantaneous power: GRF wrench equals spring+damper+hip shares") {
  ModelParams p = base_params();
  p.c = 120.0;
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    VpConfig vp;
    vp.r_vp = -0.3 + 0.6 * U(rng);
    vp.theta_vp = 0.2 * U(rng);
    vp.frame = U(rng) > 0 ? VpFrame::BodyAligned : VpFrame::WorldVertical;
    const double l = 0.78 + 0.2 * std::abs(U(rng));
    const BodyState s = stance_state(p, l, M_PI / 2 + 0.45 * U(rng),
                                     0.35 * U(rng), {4 * U(rng), 2 * U(rng)},
                                     2.0 * U(rng));
    const StanceGeometry g = leg_kinematics(s, {0, 0}, p, vp);
    const ForceBreakdown f = stance_forces(g, p);
    if (f.vp_clamped) continue;

    const double p_wrench =
        dot(f.f_total, s.com_vel()) +
        s.thetadot * cross(g.foot - s.com(), f.f_total);
    const double p_parts = f.f_sp * g.ldot + f.f_dp * g.ldot +
                           f.tau_h * (s.thetadot - g.alpha_dot);
    CHECK(p_wrench == doctest::Approx(p_parts).epsilon(1e-10).scale(
                          std::abs(p_wrench) + 1.0));
  }
}

TEST_CASE("pitch dynamics: VP at the CoM with hip at CoM gives zero moment") {
  ModelParams p = base_params();
  p.r_H = 0.0;
  VpConfig vp;  // r_vp = 0
  const BodyState s = stance_state(p, 0.9, 1.2, 0.1, {3.0, -0.5}, 0.7);
  const StanceDeriv d = stance_derivatives(s, {0, 0}, p, vp);
  CHECK(std::abs(d.dstate[5]) < 1e-9);
}

TEST_CASE("stance derivatives satisfy Newton's law for the trunk") {
  ModelParams p = base_params();
  p.c = 60.0;
  VpConfig vp;
  vp.r_vp = -0.3;
  const BodyState s = stance_state(p, 0.88, 1.35, -0.05, {3.5, -0.8}, 0.4);
  const StanceDeriv d = stance_derivatives(s, {0, 0}, p, vp);
  CHECK(d.dstate[0] == s.xdot);
  CHECK(d.dstate[1] == s.ydot);
  CHECK(d.dstate[2] == s.thetadot);
  CHECK(d.dstate[3] == doctest::Approx(d.forces.f_total.x / p.m).epsilon(1e-12));
  CHECK(d.dstate[4] ==
        doctest::Approx(d.forces.f_total.y / p.m - p.g).epsilon(1e-12));
  const double mom = grf_moment_about(s.com(), Vec2{0, 0}, d.forces.f_total);
  CHECK(d.dstate[5] == doctest::Approx(mom / p.J).epsilon(1e-12));
}

TEST_CASE("flight derivatives are ballistic") {
  ModelParams p = base_params();
  BodyState s;
  s.xdot = 3.0;
  s.ydot = 1.0;
  s.thetadot = -0.2;
  const StateVec d = flight_derivatives(s, p);
  CHECK(d[3] == 0.0);
  CHECK(d[4] == doctest::Approx(-9.81));
  CHECK(d[5] == 0.0);
}

TEST_CASE("near-singular VP geometry clamps instead of blowing up") {
  ModelParams p = base_params();
  p.r_H = 0.0;
  BodyState s;
  s.y = 0.9;
  StanceGeometry g = leg_kinematics(s, {0.0, 0.0}, p, {});
  g.r_FV = perp(g.r_FH);  // foot->VP exactly orthogonal to the leg
  const ForceBreakdown f = stance_forces(g, p);
  CHECK(f.vp_clamped);
  CHECK(std::isfinite(f.f_t));
  CHECK(std::abs(f.f_t) <=
        p.vp_tan_clamp * std::abs(f.f_ax) * (1.0 + 1e-12));
}
