#include <doctest.h>

#include <cmath>

#include "tslip/analysis.hpp"
#include "tslip/gait.hpp"
#include "tslip/kinematics.hpp"
#include "tslip/step.hpp"
#include "tslip/tuning.hpp"

using namespace tslip;

namespace {

ModelParams conservative_params() {
  ModelParams p;
  p.c = 0.0;
  p.r_H = 0.0;  // hip on the CoM: no actuator power path, pure SLIP
  return p;
}

double total_energy(const BodyState& s, const ModelParams& p, double l,
                    double l0) {
  const double kin = 0.5 * p.m * (s.xdot * s.xdot + s.ydot * s.ydot) +
                     0.5 * p.J * s.thetadot * s.thetadot;
  const double pot = p.m * p.g * s.y;
  const double el = 0.5 * p.k * (l0 - l) * (l0 - l);
  return kin + pot + el;
}

}  // namespace

TEST_CASE("conservative step: events, touch-down continuity, energy") {
  const ModelParams p = conservative_params();
  IntegratorSettings set;
  const auto fp = find_slip_fixed_point(p, 3.0, 1.0, set);
  REQUIRE(fp.has_value());
  CHECK(fp->theta_td > 0.8);
  CHECK(fp->theta_td < 1.55);

  StepControls ctl;
  ctl.theta_td = fp->theta_td;
  const StepResult r = simulate_step(fp->apex, ctl, p, 0.0, set);
  REQUIRE(r.status == StepStatus::Ok);
  REQUIRE(!r.degenerate_aerial);
  REQUIRE(r.events.size() == 3);
  CHECK(r.events[0].kind == EventKind::TouchDown);
  CHECK(r.events[1].kind == EventKind::TakeOffRestLength);
  CHECK(r.events[2].kind == EventKind::Apex);
  CHECK(r.t_td > 0.0);
  CHECK(r.t_to > r.t_td);
  CHECK(r.step_time > r.t_to);
  CHECK(!r.early_grf_cutoff);

  // Touch-down happens exactly at rest length, so the GRF starts from zero.
  const StanceGeometry g_td =
      leg_kinematics(r.events[0].state, r.foot, p, ctl.vp);
  CHECK(std::abs(g_td.l - p.l0) < 1e-9);
  const double f_td = p.k * std::abs(p.l0 - g_td.l);
  CHECK(f_td < 1e-6 * p.m * p.g);

  // Take-off state is back at rest length.
  const StanceGeometry g_to =
      leg_kinematics(r.events[1].state, r.foot, p, ctl.vp);
  CHECK(std::abs(g_to.l - p.l0) < 1e-9);

  // Next apex: vertical velocity vanishes, trunk untouched.
  CHECK(std::abs(r.apex_out.ydot) < 1e-9);
  CHECK(std::abs(r.apex_out.theta) < 1e-12);
  CHECK(std::abs(r.apex_out.thetadot) < 1e-12);

  // Trajectory is time-ordered with consistent phase tags and a
  // non-negative vertical GRF throughout stance.
  for (size_t i = 1; i < r.trajectory.size(); ++i) {
    CHECK(r.trajectory[i].t >= r.trajectory[i - 1].t);
  }
  for (const auto& s : r.trajectory) {
    if (s.phase == Phase::Stance) {
      CHECK(s.forces.f_total.y >= -1e-9);
    } else {
      CHECK(s.forces.f_total.x == 0.0);
      CHECK(s.forces.f_total.y == 0.0);
    }
  }

  // Total mechanical energy is conserved apex to apex.
  const double e_in = total_energy(r.apex_in, p, p.l0, p.l0);
  const double e_out = total_energy(r.apex_out, p, p.l0, p.l0);
  CHECK(std::abs(e_out - e_in) / e_in < 1e-8);
}

TEST_CASE("period-1 gait holds the fixed point for 25 steps") {
  const ModelParams p = conservative_params();
  IntegratorSettings set;
  const auto fp = find_slip_fixed_point(p, 4.0, 1.0, set);
  REQUIRE(fp.has_value());

  StepControls ctl;
  ctl.theta_td = fp->theta_td;
  const ControlsFn fixed = [&](int, const std::vector<StepRecord>&) {
    return ctl;
  };
  GaitOptions opt;
  opt.n_steps = 25;
  const GaitResult g =
      simulate_gait(fp->apex, fixed, p, TerrainSpec{}, opt, set);
  REQUIRE(g.status == StepStatus::Ok);
  REQUIRE(static_cast<int>(g.steps.size()) == 25);

  const ApexState ref = apex_state_of(g.steps.front());
  for (const auto& rec : g.steps) {
    CHECK(apex_delta(apex_state_of(rec), ref) < 1e-7);
  }
  CHECK(g.convergence.steady);
  CHECK(g.convergence.period == 1);
}

TEST_CASE("step onto lowered ground touches down later and lower") {
  const ModelParams p = conservative_params();
  IntegratorSettings set;
  const auto fp = find_slip_fixed_point(p, 3.0, 1.0, set);
  REQUIRE(fp.has_value());

  StepControls ctl;
  ctl.theta_td = fp->theta_td;
  const StepResult level = simulate_step(fp->apex, ctl, p, 0.0, set);
  const StepResult down = simulate_step(fp->apex, ctl, p, -0.3, set);
  REQUIRE(level.status == StepStatus::Ok);
  REQUIRE(down.status == StepStatus::Ok);
  CHECK(down.t_td > level.t_td);
  CHECK(std::abs(down.foot.y - (-0.3)) < 1e-12);
  // Extra drop height converts to speed at touch-down.
  CHECK(down.events[0].state.ydot < level.events[0].state.ydot);
}

TEST_CASE("overdamped settle trips the early GRF cut-off guard") {
  ModelParams p;
  p.r_H = 0.0;
  p.c = 10000.0;
  IntegratorSettings set;

  BodyState apex;
  apex.y = 1.05;  // vertical drop of 5 cm onto a vertical leg
  StepControls ctl;
  ctl.theta_td = 1.5707963267948966;

  const StepResult r = simulate_step(apex, ctl, p, 0.0, set);
  REQUIRE(r.status == StepStatus::Ok);
  CHECK(r.early_grf_cutoff);
  bool saw_zero_accel = false;
  for (const auto& ev : r.events) {
    if (ev.kind == EventKind::TakeOffZeroAccel) saw_zero_accel = true;
  }
  CHECK(saw_zero_accel);
}

TEST_CASE("time limit reports Timeout") {
  const ModelParams p = conservative_params();
  IntegratorSettings set;
  set.max_step_time = 0.05;  // far below the ~0.7 s a full step needs

  BodyState apex;
  apex.y = 1.0;
  apex.xdot = 3.0;
  StepControls ctl;
  ctl.theta_td = 1.2;
  const StepResult r = simulate_step(apex, ctl, p, 0.0, set);
  CHECK(r.status == StepStatus::Timeout);
}

TEST_CASE("unrecoverable touch-down posture reports Fall") {
  const ModelParams p = conservative_params();
  IntegratorSettings set;

  BodyState apex;
  apex.y = 1.02;
  apex.xdot = 1.0;
  StepControls ctl;
  ctl.theta_td = 0.15;  // nearly horizontal leg: no vertical support
  const StepResult r = simulate_step(apex, ctl, p, 0.0, set);
  CHECK(r.status == StepStatus::Fall);
}

TEST_CASE("apex precondition rejects upward velocity") {
  const ModelParams p = conservative_params();
  IntegratorSettings set;
  BodyState apex;
  apex.y = 1.0;
  apex.xdot = 3.0;
  apex.ydot = 0.5;
  StepControls ctl;
  ctl.theta_td = 1.2;
  CHECK_THROWS_AS(simulate_step(apex, ctl, p, 0.0, set), std::invalid_argument);
}

TEST_CASE("step result echoes its controls and counts no clamps nominally") {
  ModelParams p;
  p.c = 100.0;
  IntegratorSettings set;
  const auto fp = find_slip_fixed_point(p, 3.0, 1.0, set);
  REQUIRE(fp.has_value());

  StepControls ctl;
  ctl.theta_td = fp->theta_td;
  ctl.vp = VpConfig{-0.3, 0.0, VpFrame::WorldVertical};
  const StepResult r = simulate_step(fp->apex, ctl, p, 0.0, set);
  REQUIRE(r.status == StepStatus::Ok);
  CHECK(r.controls.theta_td == ctl.theta_td);
  CHECK(r.controls.vp.r_vp == ctl.vp.r_vp);
  CHECK(r.vp_clamp_count == 0);
}
