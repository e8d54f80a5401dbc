#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "tslip/model.hpp"

namespace tslip {

struct IntegratorSettings {
  double rel_tol = 1.0e-9;
  double abs_tol = 1.0e-9;
  double max_step = 1.0e-3;       ///< [s]; also caps the output sample spacing
  double event_tol = 1.0e-12;     ///< [s] event time localization tolerance
  double max_step_time = 5.0;     ///< [s] wall of simulated time per gait step
};

enum class Crossing { Rising, Falling };

/// Scalar event function g(t, state).  A crossing of zero in the configured
/// direction ends the integration.  A guard with an `arm` predicate stays
/// inactive until the predicate first returns true (latched); this is how
/// guards that start exactly at zero (e.g. leg length at touch-down) are
/// masked at t = 0.
struct Guard {
  int id = 0;
  Crossing dir = Crossing::Falling;
  std::function<double(double, const BodyState&)> value;
  std::function<bool(double, const BodyState&)> arm;  ///< null = always armed
};

struct Sample {
  double t = 0.0;
  BodyState state;
};

struct EventHit {
  int guard_id = 0;
  double t = 0.0;
  BodyState state;
};

enum class IntegrationStatus {
  Event,          ///< a guard fired
  TimeLimit,      ///< reached t_max without any guard firing
  NonFinite,      ///< state or derivative became non-finite
  StepUnderflow,  ///< step control collapsed (dynamics too stiff)
};

struct IntegrationOutcome {
  IntegrationStatus status = IntegrationStatus::TimeLimit;
  std::optional<EventHit> event;
  double t_end = 0.0;
  BodyState end_state;
};

using DerivFn = std::function<StateVec(double, const BodyState&)>;

/// Adaptive Dormand-Prince 5(4) integration until the first guard crossing.
/// Accepted steps (bounded by max_step) are appended to `samples` when it is
/// non-null, including the initial state and the event state.  Event times
/// are refined to event_tol by re-stepping inside the bracketing interval,
/// so event states carry full integration accuracy rather than
/// interpolation accuracy.
IntegrationOutcome integrate_until_event(const DerivFn& f, double t0,
                                         const BodyState& s0, double t_max,
                                         const std::vector<Guard>& guards,
                                         const IntegratorSettings& set,
                                         std::vector<Sample>* samples);

/// Plain integration to a fixed end time (no guards).
IntegrationOutcome integrate_to(const DerivFn& f, double t0,
                                const BodyState& s0, double t_end,
                                const IntegratorSettings& set,
                                std::vector<Sample>* samples);

/// Fixed-step classical Runge-Kutta 4.  Reference implementation used to
/// cross-check the adaptive path; deliberately independent of it.
BodyState rk4_integrate(const DerivFn& f, double t0, const BodyState& s0,
                        double t_end, double h);

}  // namespace tslip
