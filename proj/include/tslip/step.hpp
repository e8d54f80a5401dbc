#pragma once

#include <vector>

#include "tslip/dynamics.hpp"
#include "tslip/integrate.hpp"
#include "tslip/model.hpp"

namespace tslip {

enum class Phase { Flight, Stance };

enum class EventKind {
  TouchDown,
  TakeOffRestLength,  ///< leg length returned to l0
  TakeOffZeroGrf,     ///< vertical GRF dropped to zero (after being positive)
  TakeOffZeroAccel,   ///< vertical CoM acceleration crossed zero upward after
                      ///< minimum leg length; marks an early GRF cut-off
  Apex,
};

struct PhaseEvent {
  EventKind kind = EventKind::TouchDown;
  double t = 0.0;
  BodyState state;
};

struct TrajectorySample {
  double t = 0.0;
  Phase phase = Phase::Flight;
  BodyState state;
  ForceBreakdown forces;  ///< zero during flight
};

enum class StepStatus { Ok, Fall, Timeout, NumericalFailure };

/// Controls held fixed over one apex-to-apex step.
struct StepControls {
  double theta_td = 0.0;  ///< commanded touch-down leg angle [rad]
  VpConfig vp;
};

struct StepResult {
  StepStatus status = StepStatus::Ok;
  std::vector<TrajectorySample> trajectory;  ///< time-ordered, events included
  std::vector<PhaseEvent> events;
  BodyState apex_in;
  BodyState apex_out;
  Vec2 foot;                ///< stance contact point
  double ground_y = 0.0;    ///< ground height this step ran on
  double t_td = 0.0;        ///< touch-down time (step clock starts at apex_in)
  double t_to = 0.0;        ///< take-off time
  double step_time = 0.0;   ///< apex_in -> apex_out duration
  bool early_grf_cutoff = false;   ///< stance ended by the zero-accel guard
  bool degenerate_aerial = false;  ///< take-off had no upward velocity
  int vp_clamp_count = 0;          ///< stance samples that hit the VP clamp
  StepControls controls;
};

/// One apex-to-apex step: flight to touch-down, stance to take-off, flight
/// to the next apex.  The commanded leg angle fixes the flight leg posture;
/// the foot point is frozen where the leg tip meets the ground.
///
/// Preconditions: apex vertical velocity <= ~0 (a tiny positive residue from
/// event refinement is tolerated; negative means a degenerate aerial phase
/// handed over from the previous step), and the leg tip at or above ground
/// unless already descending.
StepResult simulate_step(const BodyState& apex, const StepControls& controls,
                         const ModelParams& p, double ground_y,
                         const IntegratorSettings& set);

}  // namespace tslip
