#pragma once

#include <string>

#include "tslip/gait.hpp"
#include "tslip/model.hpp"

namespace tslip {

/// Shortest round-trip decimal form of a double (printf %.17g, then trimmed
/// to the shortest string that parses back exactly).  Deterministic across
/// runs; used for all numeric text output.
std::string format_double(double v);

/// Write the full gait trajectory as CSV.  One row per recorded sample, step
/// boundaries deduplicated, time accumulated across steps.  Columns:
///   step, t, phase, x_c, y_c, theta_c, xdot_c, ydot_c, thetadot_c,
///   f_x, f_y, f_sp, f_dp, tau_h, foot_x, foot_y, ground_y
/// Forces are zero during flight; foot_x/foot_y are the stance contact of
/// the row's step.
void write_trajectory_csv(const std::string& path, const GaitResult& gait);

/// Write a small per-step CSV: apex state, timing, duty, events.  Columns:
///   step, ground_y, apex_h, apex_xdot, apex_theta, apex_thetadot,
///   theta_td, r_vp, theta_vp, t_td, t_to, step_time, duty, early_cutoff,
///   degenerate, status
void write_steps_csv(const std::string& path, const GaitResult& gait);

}  // namespace tslip
