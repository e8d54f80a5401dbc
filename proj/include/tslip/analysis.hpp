#pragma once

#include <stdexcept>
#include <vector>

#include "tslip/gait.hpp"
#include "tslip/model.hpp"
#include "tslip/step.hpp"

namespace tslip {

struct NoStanceError : std::runtime_error {
  NoStanceError() : std::runtime_error("analysis: step has no stance phase") {}
};
struct DegenerateLinesError : std::runtime_error {
  DegenerateLinesError()
      : std::runtime_error("estimate_vp: force lines are near-parallel") {}
};

/// Stance trajectory resampled to at least n_min uniformly spaced samples
/// (cubic Hermite on the recorded states, forces recomputed exactly).
std::vector<TrajectorySample> resample_stance(const StepResult& step,
                                              const ModelParams& p,
                                              int n_min = 200);

struct GrfPoint {
  double t_pct = 0.0;  ///< time, % of step duration
  double fx_bw = 0.0;  ///< horizontal GRF / (m g)
  double fy_bw = 0.0;  ///< vertical GRF / (m g)
};

struct GrfProfile {
  std::vector<GrfPoint> series;  ///< stance window only
  double stance_begin_pct = 0.0;
  double stance_end_pct = 0.0;
  double peak_vgrf_bw = 0.0;
  double t_peak_vgrf_pct = 0.0;
  double peak_brake_bw = 0.0;  ///< most negative horizontal GRF [BW], signed
  double peak_prop_bw = 0.0;   ///< most positive horizontal GRF [BW]
  double brake_time_frac = 0.0;  ///< fraction of stance with F_x < 0
  double prop_time_frac = 0.0;
  double vgrf_skew = 0.0;  ///< (t_peak - stance midpoint) / stance duration
};

GrfProfile grf_profiles(const StepResult& step, const ModelParams& p,
                        int n_min = 200);

/// Impulses over one step, normalized by m * g * step_time.
struct Impulses {
  double vertical = 0.0;
  double braking = 0.0;     ///< negative-x impulse (signed, <= 0)
  double propulsion = 0.0;  ///< positive-x impulse (>= 0)
  double net_horizontal = 0.0;
};

Impulses impulses(const StepResult& step, const ModelParams& p,
                  int n_min = 200);

/// Per-step work ledger.  w_grf is the work of the total GRF wrench on the
/// trunk (force at the foot contact of the extended body); it decomposes
/// exactly into spring + damper + hip shares.
struct WorkBreakdown {
  double w_spring = 0.0;
  double w_damper = 0.0;
  double w_hip = 0.0;
  double w_hip_neg = 0.0;  ///< negative (dissipative) part of hip work
  double w_hip_pos = 0.0;
  double w_grf = 0.0;
  double dE_kin = 0.0;
  double dE_pot = 0.0;
  double residual = 0.0;  ///< (dE_kin + dE_pot) - (spring + damper + hip)
  // stance power series for plotting
  std::vector<double> t_pct;
  std::vector<double> p_spring, p_damper, p_hip;
};

WorkBreakdown work_decomposition(const StepResult& step, const ModelParams& p,
                                 int n_min = 200);

/// Mean duty factor = stance_time / (2 * step_time) over steps [from, end).
/// from < 0 selects the trailing half (at most the last 10 steps).
double duty_factor(const std::vector<StepRecord>& steps, int from = -1);

struct VpEstimate {
  Vec2 point;                 ///< CoM-relative VP, in the gait's VP frame
  double rms_residual = 0.0;  ///< RMS point-to-line distance [m]
  int n_lines = 0;
};

/// Least-squares intersection of the GRF action lines over one stance, in
/// CoM-centered coordinates of the step's VP frame.  Samples with
/// |F| < min_force_bw * m * g are skipped.  Throws DegenerateLinesError when
/// the lines are too close to parallel to pin an intersection.
VpEstimate estimate_vp(const StepResult& step, const ModelParams& p,
                       double min_force_bw = 1e-3);

struct EnergyAudit {
  double dKE = 0.0;
  double dPE = 0.0;
  double w_spring = 0.0;
  double w_damper = 0.0;
  double w_hip = 0.0;
  double residual = 0.0;          ///< energy-balance defect over the step [J]
  double flight_drift_rel = 0.0;  ///< max relative energy drift in flight
};

EnergyAudit energy_audit(const StepResult& step, const ModelParams& p,
                         int n_min = 200);

}  // namespace tslip
