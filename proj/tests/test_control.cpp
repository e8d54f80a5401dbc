#include <doctest.h>

#include <cmath>
#include <vector>

#include "tslip/control.hpp"
#include "tslip/gait.hpp"
#include "tslip/tuning.hpp"

using namespace tslip;

TEST_CASE("leg-angle update sums its terms and clamps") {
  ControllerGains g;
  g.k_y = 0.2;
  g.k_xdot0 = 0.05;
  g.k_xdot = 0.03;
  g.k_theta = 0.4;
  g.k_thetabar = 0.6;
  g.xdot_des = 3.0;
  g.theta_c_des = 0.05;

  ApexObservation obs;
  obs.apex_height = 0.98;
  obs.prev_apex_height = 1.01;
  obs.xdot = 2.8;
  obs.prev_xdot = 2.9;
  obs.theta = 0.12;
  obs.theta_mean_stance = 0.02;

  const double expect = 1.1 + 0.2 * (0.98 - 1.01) + 0.05 * (3.0 - 2.8) +
                        0.03 * (2.8 - 2.9) + 0.4 * std::abs(0.05 - 0.12) +
                        0.6 * (0.05 - 0.02);
  CHECK(next_leg_angle(1.1, obs, g) == doctest::Approx(expect).epsilon(1e-12));

  // The trunk-angle error term is even in the error sign.
  ApexObservation mirrored = obs;
  mirrored.theta = 0.05 - (0.12 - 0.05);
  CHECK(next_leg_angle(1.1, mirrored, g) ==
        doctest::Approx(expect).epsilon(1e-12));

  g.k_y = 1e6;
  CHECK(next_leg_angle(1.1, obs, g) == doctest::Approx(1e-6));
  obs.apex_height = 1.5;
  CHECK(next_leg_angle(1.1, obs, g) == doctest::Approx(M_PI - 1e-6));
}

TEST_CASE("virtual-point radius relaxes halfway toward its gated target") {
  ControllerGains g;
  g.r_vp_des = -0.3;
  ApexObservation obs;

  VpConfig v;
  v.r_vp = -0.1;
  v = next_vp(v, obs, g, false);
  CHECK(v.r_vp == doctest::Approx(-0.2).epsilon(1e-12));
  v = next_vp(v, obs, g, false);
  CHECK(v.r_vp == doctest::Approx(-0.25).epsilon(1e-12));
  v = next_vp(v, obs, g, false);
  CHECK(v.r_vp == doctest::Approx(-0.275).epsilon(1e-12));

  // Gate: a large trunk-rate change shrinks the admissible radius.
  g.k_rvp = 0.5;
  obs.dtheta_dot_stance = 0.4;
  VpConfig w;
  w.r_vp = -0.3;
  w = next_vp(w, obs, g, false);
  CHECK(w.r_vp == doctest::Approx(-0.2).epsilon(1e-12));  // target gated to 0.1

  // Gate floors at zero rather than flipping the sign.
  obs.dtheta_dot_stance = 10.0;
  w.r_vp = -0.05;
  w = next_vp(w, obs, g, false);
  CHECK(w.r_vp == doctest::Approx(-0.025).epsilon(1e-12));
}

TEST_CASE("virtual-point radius reattaches the target's sign") {
  ControllerGains g;
  g.r_vp_des = -0.3;
  ApexObservation obs;
  VpConfig v;
  v.r_vp = +0.2;
  v = next_vp(v, obs, g, false);
  CHECK(v.r_vp == doctest::Approx(-0.25).epsilon(1e-12));

  // Zero target decays the magnitude and keeps the previous side.
  g.r_vp_des = 0.0;
  VpConfig w;
  w.r_vp = -0.2;
  w = next_vp(w, obs, g, false);
  CHECK(w.r_vp == doctest::Approx(-0.1).epsilon(1e-12));
}

TEST_CASE("virtual-point angle law and step-down offsets") {
  ControllerGains g;
  g.theta_vp_des = 0.05;
  g.k_thetavp = 0.7;
  g.theta_c_des = 0.1;
  g.r_vp_des = -0.3;
  ApexObservation obs;
  obs.dtheta_stance = 0.25;

  VpConfig v;
  v.r_vp = -0.3;
  v.theta_vp = 0.0;
  const VpConfig out = next_vp(v, obs, g, false);
  CHECK(out.theta_vp == doctest::Approx(0.05 + 0.7 * (0.1 - 0.25)).epsilon(1e-12));

  // At the step-down step the one-shot offsets replace both update laws.
  g.r_vp_off = -0.05;
  g.theta_vp_off = 0.2;
  VpConfig before;
  before.r_vp = -0.2;
  before.theta_vp = 0.1;
  const VpConfig sd = next_vp(before, obs, g, true);
  CHECK(sd.r_vp == doctest::Approx(-0.25).epsilon(1e-12));
  CHECK(sd.theta_vp == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("observe assembles apex and stance signals from the history") {
  StepRecord r0;
  r0.ground = 0.0;
  r0.step.apex_out.y = 1.00;
  r0.step.apex_out.xdot = 3.0;

  StepRecord r1;
  r1.ground = -0.1;
  r1.step.apex_out.y = 0.95;
  r1.step.apex_out.xdot = 3.2;
  r1.step.apex_out.theta = 0.04;

  PhaseEvent td;
  td.kind = EventKind::TouchDown;
  td.state.theta = 0.01;
  td.state.thetadot = -0.3;
  PhaseEvent to;
  to.kind = EventKind::TakeOffZeroGrf;
  to.state.theta = 0.06;
  to.state.thetadot = 0.5;
  r1.step.events = {td, to};

  TrajectorySample f0;
  f0.t = 0.0;
  f0.phase = Phase::Flight;
  TrajectorySample s0;
  s0.t = 0.1;
  s0.phase = Phase::Stance;
  s0.state.theta = 0.0;
  TrajectorySample s1 = s0;
  s1.t = 0.2;
  s1.state.theta = 0.1;
  TrajectorySample s2 = s0;
  s2.t = 0.3;
  s2.state.theta = 0.2;
  r1.step.trajectory = {f0, s0, s1, s2};

  const ApexObservation obs = observe({r0, r1});
  CHECK(obs.apex_height == doctest::Approx(1.05).epsilon(1e-12));
  CHECK(obs.prev_apex_height == doctest::Approx(1.00).epsilon(1e-12));
  CHECK(obs.xdot == doctest::Approx(3.2));
  CHECK(obs.prev_xdot == doctest::Approx(3.0));
  CHECK(obs.dground == doctest::Approx(-0.1));
  CHECK(obs.theta == doctest::Approx(0.04));
  CHECK(obs.dtheta_dot_stance == doctest::Approx(0.8));
  CHECK(obs.dtheta_stance == doctest::Approx(0.05));
  CHECK(obs.theta_mean_stance == doctest::Approx(0.1).epsilon(1e-12));

  // Single-record history: differences read as zero.
  const ApexObservation first = observe({r1});
  CHECK(first.apex_height == doctest::Approx(first.prev_apex_height));
  CHECK(first.xdot == doctest::Approx(first.prev_xdot));
  CHECK(first.dground == 0.0);
}

TEST_CASE("controller output for a step ignores that step's own terrain") {
  ModelParams p;
  p.c = 0.0;
  p.r_H = 0.0;
  IntegratorSettings set;
  const auto fp = find_slip_fixed_point(p, 3.0, 1.0, set);
  REQUIRE(fp.has_value());

  ControllerGains g;
  g.k_y = 0.1;
  g.k_xdot0 = 0.1;
  g.xdot_des = 3.0;
  StepControls init;
  init.theta_td = fp->theta_td;

  const ApexController ctrl(g, init);
  const ControlsFn fn = [&](int k, const std::vector<StepRecord>& done) {
    return ctrl.controls_for_step(k, done);
  };
  GaitOptions opt;
  opt.n_steps = 8;

  TerrainSpec level;
  TerrainSpec drop;
  drop.kind = TerrainSpec::Kind::SingleStepDown;
  drop.dy_step = -0.1;
  drop.at_step = 4;

  const GaitResult a = simulate_gait(fp->apex, fn, p, level, opt, set);
  const GaitResult b = simulate_gait(fp->apex, fn, p, drop, opt, set);
  REQUIRE(a.status == StepStatus::Ok);
  REQUIRE(b.status == StepStatus::Ok);
  REQUIRE(a.steps.size() >= 6);
  REQUIRE(b.steps.size() >= 6);

  CHECK(b.steps[3].ground == 0.0);
  CHECK(b.steps[4].ground == doctest::Approx(-0.1));

  // One-step delay: the step that lands on the drop still runs on controls
  // computed from level history; the correction appears one step later.
  for (int k = 0; k <= 4; ++k) {
    CHECK(b.steps[k].step.controls.theta_td ==
          doctest::Approx(a.steps[k].step.controls.theta_td).epsilon(1e-12));
  }
  CHECK(std::abs(b.steps[5].step.controls.theta_td -
                 a.steps[5].step.controls.theta_td) > 1e-4);
}

TEST_CASE("controller serves its initial controls for step zero") {
  ControllerGains g;
  g.k_y = 0.3;
  StepControls init;
  init.theta_td = 1.23;
  init.vp = VpConfig{-0.3, 0.02, VpFrame::WorldVertical};
  const ApexController ctrl(g, init);
  const StepControls c = ctrl.controls_for_step(0, {});
  CHECK(c.theta_td == 1.23);
  CHECK(c.vp.r_vp == -0.3);
  CHECK(c.vp.theta_vp == 0.02);
}
