#pragma once

#include <functional>
#include <vector>

#include "tslip/model.hpp"
#include "tslip/step.hpp"
#include "tslip/terrain.hpp"

namespace tslip {

struct StepRecord {
  StepResult step;
  double ground = 0.0;  ///< ground level the step ran on
};

/// Apex state used for convergence bookkeeping: height above local ground,
/// forward speed, trunk pitch, trunk rate.
struct ApexState {
  double h = 0.0;
  double xdot = 0.0;
  double theta = 0.0;
  double thetadot = 0.0;
};

ApexState apex_state_of(const StepRecord& rec);

/// Scaled infinity-norm distance between apex states.  Components are
/// normalized by max(|reference|, floor) with floors of 0.01 in SI units,
/// so "relative" stays meaningful for near-zero pitch states.
double apex_delta(const ApexState& a, const ApexState& ref);

struct ConvergenceReport {
  bool steady = false;
  int first_steady_step = -1;  ///< first index of the trailing steady run
  int period = 0;              ///< 0 = aperiodic, else smallest of 1..4
  std::vector<double> deltas;  ///< per-step apex delta vs previous step
};

struct GaitResult {
  std::vector<StepRecord> steps;
  StepStatus status = StepStatus::Ok;  ///< Ok, or why the gait ended early
  ConvergenceReport convergence;
};

struct GaitOptions {
  int n_steps = 50;
  double convergence_tol = 1e-6;
  int period_max = 4;
};

/// Controls supplier: called once per step with the completed history.
using ControlsFn =
    std::function<StepControls(int step_index, const std::vector<StepRecord>&)>;

/// Run an apex-to-apex gait over the given terrain.  apex0 carries absolute
/// coordinates (y includes ground_level(terrain, 0)).  Terminates early on
/// Fall/Timeout/NumericalFailure, reporting partial results.
GaitResult simulate_gait(const BodyState& apex0, const ControlsFn& controls,
                         const ModelParams& p, const TerrainSpec& terrain,
                         const GaitOptions& opt, const IntegratorSettings& set);

}  // namespace tslip
