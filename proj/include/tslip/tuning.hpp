#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "tslip/control.hpp"
#include "tslip/gait.hpp"
#include "tslip/model.hpp"
#include "tslip/terrain.hpp"

namespace tslip {

/// Symmetric period-1 gait of the conservative, torque-free model: damping
/// and hip offset are zeroed internally and the virtual point sits on the
/// CoM.  The trunk is inert and energy is conserved in this regime, so the
/// apex map reduces to one dimension and the touch-down angle is found by
/// bracketed bisection on the apex-height return.
struct SlipFixedPoint {
  double theta_td = 0.0;
  BodyState apex;  ///< y is absolute (ground at 0)
};

/// Two fixed points usually coexist at a given apex: a steep-leg gait that
/// barely leaves the ground and a shallow-leg gait with a long aerial phase.
enum class SlipBranch { Steep, Flat };

std::optional<SlipFixedPoint> find_slip_fixed_point(
    const ModelParams& p, double speed, double apex_height,
    const IntegratorSettings& set, SlipBranch branch = SlipBranch::Steep);

/// Periodic gait of the full model under fixed controls.  The apex state
/// (h, xdot, theta, thetadot) is mapped through one step on repeating
/// terrain (level or constant decline); Newton iteration with finite
/// differences drives the return-map residual to zero.  theta_td joins the
/// unknowns so the target forward speed can be imposed.
struct PeriodicGait {
  BodyState apex;        ///< absolute coordinates, ground at 0 for step 0
  double theta_td = 0.0;
  VpConfig vp;
  double residual = 0.0;  ///< scaled return-map defect
  bool found = false;
};

PeriodicGait find_periodic_gait(const ModelParams& p, double speed,
                                double dy_gnd, const VpConfig& vp,
                                double theta_td0, const BodyState& apex0,
                                const IntegratorSettings& set);

/// One tuned cell of the experiment table.
struct GainCell {
  double speed = 0.0;
  double grade = 0.0;  ///< per-step drop magnitude [m], 0 = level
  char vp_side = 'B';  ///< 'A' above CoM (body frame), 'B' below (world frame)
  double c = 0.0;      ///< damping used for this cell
  ControllerGains gains;
  double theta_td0 = 0.0;  ///< converged touch-down angle
  VpConfig vp0;            ///< converged virtual-point placement
  ApexState apex0;         ///< converged apex state (height above ground)
  double duty = 0.0;
  double conv_delta = 0.0;  ///< trailing apex delta of the stored gait
};

struct TuneSettings {
  int n_steps = 60;
  int sweeps = 2;               ///< coordinate-search passes over the gains
  double probe_height = 0.02;   ///< apex-height kick used to score stability
  double probe_speed = 0.2;     ///< speed kick [m/s]
  double probe_pitch = 0.05;    ///< trunk-pitch kick [rad]
  double duty_lo = 0.25;        ///< admissible duty-factor band
  double duty_hi = 0.35;
  double c_max = 3000.0;
  IntegratorSettings integ;     ///< integration settings used while tuning
};

/// Largest damping coefficient in [0, c_max] for which the cell's gait
/// still converges, keeps its duty factor inside [duty_lo, duty_hi], and
/// never ends stance through the early-GRF-cutoff guard.  Bisection on the
/// admissibility boundary; requires the cell to be admissible at c = c_lo.
std::optional<double> tune_damping(const GainCell& cell, const ModelParams& p,
                                   const TuneSettings& ts, double c_lo);

/// Deterministic coordinate search over the discrete-controller gain space,
/// maximizing a convergence score (period-1 convergence from kicked initial
/// states, speed error, bounded trunk excursion).  Returns the improved
/// cell; the search is seeded by the cell's current gains.
GainCell search_gains(const GainCell& seed_cell, const ModelParams& p,
                      const TuneSettings& ts);

// -- shared helpers (used by the CLI and tests) ------------------------------

/// Run the closed-loop gait of a cell from its stored initial state.
GaitResult run_cell(const GainCell& cell, const ModelParams& p,
                    const TerrainSpec& terrain, int n_steps,
                    const IntegratorSettings& set);

/// Model parameters with the cell's damping applied.
ModelParams cell_params(const GainCell& cell, const ModelParams& base);

/// Initial controls (touch-down angle + VP) of a cell.
StepControls cell_controls(const GainCell& cell);

/// Absolute apex BodyState from a cell's stored relative apex state.
BodyState cell_apex(const GainCell& cell, double ground_y);

}  // namespace tslip
