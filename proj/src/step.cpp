#include "tslip/step.hpp"

#include <cmath>
#include <stdexcept>

namespace tslip {
namespace {

enum GuardId {
  kTouchDown = 1,
  kFall,
  kRestLength,
  kZeroGrf,
  kZeroAccel,
  kCollapse,
  kApex,
};

StepStatus failure_status(IntegrationStatus s) {
  switch (s) {
    case IntegrationStatus::TimeLimit:
      return StepStatus::Timeout;
    case IntegrationStatus::NonFinite:
    case IntegrationStatus::StepUnderflow:
      return StepStatus::NumericalFailure;
    default:
      return StepStatus::Ok;
  }
}

}  // namespace

StepResult simulate_step(const BodyState& apex, const StepControls& controls,
                         const ModelParams& p, double ground_y,
                         const IntegratorSettings& set) {
  if (apex.ydot > 1e-6) {
    throw std::invalid_argument("simulate_step: start state is not an apex");
  }

  StepResult r;
  r.apex_in = apex;
  r.ground_y = ground_y;
  r.controls = controls;

  const auto fder = [&p](double, const BodyState& s) {
    return flight_derivatives(s, p);
  };

  // --- flight: apex to touch-down -----------------------------------------
  BodyState td_state = apex;
  double t_td = 0.0;
  const double tip0 = flight_foot(apex, p, controls.theta_td).y - ground_y;
  if (tip0 <= 0.0) {
    // Leg tip already at the ground (possible when the previous take-off had
    // no upward velocity): touch down immediately.
    r.trajectory.push_back({0.0, Phase::Flight, apex, {}});
  } else {
    std::vector<Guard> guards;
    guards.push_back({kTouchDown, Crossing::Falling,
                      [&](double, const BodyState& s) {
                        return flight_foot(s, p, controls.theta_td).y - ground_y;
                      },
                      nullptr});
    guards.push_back({kFall, Crossing::Falling,
                      [&](double, const BodyState& s) { return s.y - ground_y; },
                      nullptr});
    std::vector<Sample> fs;
    const auto out =
        integrate_until_event(fder, 0.0, apex, set.max_step_time, guards, set, &fs);
    for (const Sample& s : fs) r.trajectory.push_back({s.t, Phase::Flight, s.state, {}});
    if (out.status != IntegrationStatus::Event) {
      r.status = failure_status(out.status);
      return r;
    }
    if (out.event->guard_id == kFall) {
      r.status = StepStatus::Fall;
      return r;
    }
    td_state = out.event->state;
    t_td = out.event->t;
  }
  r.t_td = t_td;
  r.events.push_back({EventKind::TouchDown, t_td, td_state});

  Vec2 foot = flight_foot(td_state, p, controls.theta_td);
  foot.y = ground_y;  // event refinement leaves O(event_tol) residue
  r.foot = foot;

  // --- stance ---------------------------------------------------------------
  const auto sder = [&](double, const BodyState& s) {
    return stance_derivatives(s, foot, p, controls.vp).dstate;
  };
  const double grf_arm = 1e-6 * p.m * p.g;

  std::vector<Guard> guards;
  guards.push_back({kRestLength, Crossing::Rising,
                    [&](double, const BodyState& s) {
                      return (hip_point(s, p) - foot).norm() - p.l0;
                    },
                    [&](double, const BodyState& s) {
                      return (hip_point(s, p) - foot).norm() - p.l0 < -1e-9;
                    }});
  guards.push_back({kZeroGrf, Crossing::Falling,
                    [&](double, const BodyState& s) {
                      return stance_derivatives(s, foot, p, controls.vp)
                          .forces.f_total.y;
                    },
                    [&](double, const BodyState& s) {
                      return stance_derivatives(s, foot, p, controls.vp)
                                 .forces.f_total.y > grf_arm;
                    }});
  guards.push_back({kZeroAccel, Crossing::Rising,
                    [&](double, const BodyState& s) {
                      return stance_derivatives(s, foot, p, controls.vp)
                          .dstate[4];
                    },
                    [&](double, const BodyState& s) {
                      // arms at minimum leg length (leg starts re-extending)
                      return leg_kinematics(s, foot, p, controls.vp).ldot > 0.0;
                    }});
  guards.push_back({kCollapse, Crossing::Falling,
                    [&](double, const BodyState& s) {
                      return (hip_point(s, p) - foot).norm() - 0.05 * p.l0;
                    },
                    nullptr});
  guards.push_back({kFall, Crossing::Falling,
                    [&](double, const BodyState& s) { return s.y - ground_y; },
                    nullptr});

  std::vector<Sample> ss;
  const auto out = integrate_until_event(sder, t_td, td_state,
                                         set.max_step_time, guards, set, &ss);
  for (const Sample& s : ss) {
    const StanceDeriv d = stance_derivatives(s.state, foot, p, controls.vp);
    if (d.forces.vp_clamped) ++r.vp_clamp_count;
    r.trajectory.push_back({s.t, Phase::Stance, s.state, d.forces});
  }
  if (out.status != IntegrationStatus::Event) {
    r.status = failure_status(out.status);
    return r;
  }
  if (out.event->guard_id == kFall || out.event->guard_id == kCollapse) {
    r.status = StepStatus::Fall;
    return r;
  }

  const BodyState to_state = out.event->state;
  r.t_to = out.event->t;
  EventKind to_kind = EventKind::TakeOffRestLength;
  if (out.event->guard_id == kZeroGrf) to_kind = EventKind::TakeOffZeroGrf;
  if (out.event->guard_id == kZeroAccel) {
    to_kind = EventKind::TakeOffZeroAccel;
    r.early_grf_cutoff = true;
  }
  r.events.push_back({to_kind, r.t_to, to_state});

  // --- flight: take-off to apex ----------------------------------------------
  BodyState apex_out = to_state;
  double t_apex = r.t_to;
  if (to_state.ydot > 0.0) {
    std::vector<Guard> ag;
    ag.push_back({kApex, Crossing::Falling,
                  [](double, const BodyState& s) { return s.ydot; }, nullptr});
    std::vector<Sample> fs;
    const auto out2 = integrate_until_event(fder, r.t_to, to_state,
                                            set.max_step_time, ag, set, &fs);
    for (const Sample& s : fs) r.trajectory.push_back({s.t, Phase::Flight, s.state, {}});
    if (out2.status != IntegrationStatus::Event) {
      r.status = failure_status(out2.status);
      return r;
    }
    apex_out = out2.event->state;
    t_apex = out2.event->t;
  } else {
    r.degenerate_aerial = true;
    r.trajectory.push_back({r.t_to, Phase::Flight, to_state, {}});
  }
  r.events.push_back({EventKind::Apex, t_apex, apex_out});
  r.apex_out = apex_out;
  r.step_time = t_apex;
  // A step that ends with the body at or below the ground is a fall, even
  // when the terminating event was a nominal take-off (the leg can lose its
  // grip while the trunk keeps descending).
  r.status = apex_out.y <= ground_y + 1e-9 ? StepStatus::Fall : StepStatus::Ok;
  return r;
}

}  // namespace tslip
