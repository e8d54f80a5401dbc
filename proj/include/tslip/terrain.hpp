#pragma once

namespace tslip {

/// Piecewise-constant ground height per gait step.  Ground changes take
/// effect at apex: step k runs entirely on ground_level(k).
struct TerrainSpec {
  enum class Kind {
    Level,
    SingleStepDown,   ///< one drop of dy_step at step index at_step
    ConstantDecline,  ///< every step drops by dy_gnd (treadmill-style slope)
  };
  Kind kind = Kind::Level;
  double y0 = 0.0;       ///< ground height for step 0 [m]
  double dy_step = 0.0;  ///< single-drop height, negative = down [m]
  int at_step = 0;       ///< index of the step that experiences the drop
  double dy_gnd = 0.0;   ///< per-step drop for ConstantDecline, negative [m]
};

double ground_level(const TerrainSpec& t, int step_index);

/// Slope angle [rad] implied by a per-step drop and the mean step length.
double effective_slope(const TerrainSpec& t, double mean_step_length);

}  // namespace tslip
