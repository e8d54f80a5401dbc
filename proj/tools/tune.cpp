#include "tune.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "tslip/analysis.hpp"
#include "tslip/control.hpp"
#include "tslip/gain_table.hpp"
#include "tslip/tuning.hpp"

namespace tslip::cli {
namespace {

struct Target {
  char side = 'B';
  double speed = 3.0;
  double grade = 0.0;  // per-step drop magnitude, 0 = level
  std::string name;
};

std::vector<Target> make_targets() {
  std::vector<Target> out;
  const auto add = [&out](char side, double speed, double grade) {
    Target t;
    t.side = side;
    t.speed = speed;
    t.grade = grade;
    char buf[48];
    if (grade == 0.0) {
      std::snprintf(buf, sizeof buf, "%c-%g-level", side, speed);
    } else {
      std::snprintf(buf, sizeof buf, "%c-%g-dy%g", side, speed, grade);
    }
    t.name = buf;
    out.push_back(t);
  };
  for (char side : {'A', 'B'}) {
    for (double v : {2.0, 3.0, 4.0, 5.0}) add(side, v, 0.0);
  }
  for (double grade : {0.1, 0.2, 0.3, 0.4}) {
    for (double v : {2.0, 3.0, 4.0, 5.0}) add('B', v, grade);
  }
  return out;
}

IntegratorSettings seed_integ() {
  IntegratorSettings s;
  s.rel_tol = 1e-9;
  s.abs_tol = 1e-9;
  s.max_step = 2e-3;
  return s;
}

IntegratorSettings search_integ() {
  IntegratorSettings s;
  s.rel_tol = 1e-7;
  s.abs_tol = 1e-7;
  s.max_step = 2e-3;
  return s;
}

IntegratorSettings freeze_integ() {
  IntegratorSettings s;  // library defaults
  return s;
}

// Light damping used while the gains are searched; the final damping is
// picked per cell afterwards.
constexpr double kWorkDamping = 20.0;

// Duty-factor target per experiment family.  Duty must fall with running
// speed (and further with downhill grade), so each cell gets a narrow band
// around a linear-in-speed center rather than one family-wide band.
void duty_band(char side, double speed, double grade, double& lo,
               double& hi) {
  // Downhill cells share one speed-indexed band across all grades: holding
  // the grounded fraction while the descent grows flightier is exactly what
  // drives the tuned damping up with grade.
  double center = grade > 0.0  ? 0.32 - (speed - 2.0) * 0.12 / 3.0
                  : side == 'A' ? 0.40 - (speed - 2.0) * 0.12 / 3.0
                                : 0.35 - (speed - 2.0) * 0.10 / 3.0;
  lo = center - 0.035;
  hi = center + 0.035;
}

// Starting cell for a level gait.  The touch-down angle and apex come from
// the conservative spring-mass gait; the virtual point starts on the CoM and
// the radius setpoint lets the per-step relaxation walk it out to +/-30 cm,
// so the closed loop itself carries the gait from the spring-mass regime to
// the virtual-point regime.
std::optional<GainCell> seed_level_cell(const Target& t,
                                        const ModelParams& base) {
  ModelParams p = base;
  p.c = kWorkDamping;
  std::optional<SlipFixedPoint> fp;
  for (double h0 : {1.05, 1.0, 1.1, 0.98}) {
    fp = find_slip_fixed_point(p, t.speed, h0, seed_integ());
    if (fp) break;
  }
  if (!fp) return std::nullopt;

  GainCell cell;
  cell.speed = t.speed;
  cell.grade = 0.0;
  cell.vp_side = t.side;
  cell.c = kWorkDamping;
  cell.theta_td0 = fp->theta_td;
  // The conservative gait ignores the hip offset; restore enough apex height
  // for the foot to clear the ground at the real hip position.
  cell.apex0.h =
      std::max(fp->apex.y, p.l0 * std::sin(fp->theta_td) + p.r_H + 0.03);
  cell.apex0.xdot = t.speed;
  cell.apex0.theta = 0.0;
  cell.apex0.thetadot = 0.0;
  cell.vp0.frame =
      t.side == 'A' ? VpFrame::BodyAligned : VpFrame::WorldVertical;
  cell.vp0.r_vp = 0.0;
  cell.vp0.theta_vp = 0.0;

  // Polish the spring-mass guess into the true orbit of the damped trunk
  // model with the virtual point still on the CoM; the stage loop then walks
  // the radius out from an exact anchor instead of an approximate one.
  BodyState guess;
  guess.y = cell.apex0.h;
  guess.xdot = t.speed;
  const PeriodicGait orbit = find_periodic_gait(
      p, t.speed, 0.0, cell.vp0, cell.theta_td0, guess, seed_integ());
  if (orbit.found) {
    cell.theta_td0 = orbit.theta_td;
    cell.apex0.h = orbit.apex.y;
    cell.apex0.xdot = orbit.apex.xdot;
    cell.apex0.theta = orbit.apex.theta;
    cell.apex0.thetadot = orbit.apex.thetadot;
  }

  ControllerGains g;
  g.k_y = 0.1;
  g.k_xdot0 = 0.1;
  g.xdot_des = t.speed;
  g.theta_c_des = 0.0;
  g.r_vp_des = t.side == 'A' ? 0.30 : -0.30;
  g.theta_vp_des = 0.0;
  cell.gains = g;
  return cell;
}

TerrainSpec cell_terrain(const GainCell& cell) {
  TerrainSpec t;
  if (cell.grade != 0.0) {
    t.kind = TerrainSpec::Kind::ConstantDecline;
    t.dy_gnd = -cell.grade;
  }
  return t;
}

// --- Open-loop orbit continuation ---------------------------------------
// The gain search only has to stabilize a gait that already exists, so the
// cell's anchor is first carried to the target damping / radius / grade by
// continuation of the exact periodic orbit.  Each helper walks one parameter
// with adaptive step halving and leaves the anchor on the orbit it reached.

// Refine the anchor into the exact orbit at the cell's current parameters.
bool polish_orbit(GainCell& cell, const ModelParams& base) {
  ModelParams p = base;
  p.c = cell.c;
  BodyState guess;
  guess.y = cell.apex0.h;
  guess.xdot = cell.apex0.xdot;
  guess.theta = cell.apex0.theta;
  guess.thetadot = cell.apex0.thetadot;
  const PeriodicGait orbit =
      find_periodic_gait(p, cell.speed, -cell.grade, cell.vp0, cell.theta_td0,
                         guess, seed_integ());
  if (!orbit.found) return false;
  // Several orbit families coexist; a solution far from the predictor means
  // the solver hopped onto a neighbor.  Continuation treats that as a fold
  // and retries with a smaller parameter step.
  if (std::fabs(orbit.apex.y - cell.apex0.h) > 0.08 ||
      std::fabs(orbit.theta_td - cell.theta_td0) > 0.04 ||
      std::fabs(orbit.apex.thetadot - cell.apex0.thetadot) > 0.15) {
    return false;
  }
  cell.theta_td0 = orbit.theta_td;
  cell.apex0.h = orbit.apex.y;
  cell.apex0.xdot = orbit.apex.xdot;
  cell.apex0.theta = orbit.apex.theta;
  cell.apex0.thetadot = orbit.apex.thetadot;
  return true;
}

// One open-loop step on the anchor; nullopt when it is not a clean step.
std::optional<StepResult> anchor_step(const GainCell& cell,
                                      const ModelParams& base) {
  ModelParams p = base;
  p.c = cell.c;
  BodyState a;
  a.y = cell.apex0.h;
  a.xdot = cell.apex0.xdot;
  a.theta = cell.apex0.theta;
  a.thetadot = cell.apex0.thetadot;
  StepControls ctl;
  ctl.theta_td = cell.theta_td0;
  ctl.vp = cell.vp0;
  StepResult s = simulate_step(a, ctl, p, 0.0, seed_integ());
  if (s.status != StepStatus::Ok || s.degenerate_aerial) return std::nullopt;
  return s;
}

// Duty factor of the anchored orbit (stance over stride).
std::optional<double> orbit_duty(const GainCell& cell,
                                 const ModelParams& base) {
  const std::optional<StepResult> s = anchor_step(cell, base);
  if (!s || s->step_time <= 0.0) return std::nullopt;
  return (s->t_to - s->t_td) / (2.0 * s->step_time);
}

// Mean trunk pitch over the stance samples of the anchored orbit.
double orbit_stance_pitch(const GainCell& cell, const ModelParams& base) {
  const std::optional<StepResult> s = anchor_step(cell, base);
  if (!s) return cell.apex0.theta;
  double acc = 0.0;
  int n = 0;
  for (const TrajectorySample& ts : s->trajectory) {
    if (ts.phase != Phase::Flight) {
      acc += ts.state.theta;
      ++n;
    }
  }
  return n > 0 ? acc / n : cell.apex0.theta;
}

// Walk the damping coefficient to c_tgt, polishing the orbit along the way.
bool continue_damping(GainCell& cell, const ModelParams& base, double c_tgt) {
  double factor = 1.5;
  while (std::fabs(cell.c - c_tgt) > 1e-6 * c_tgt) {
    GainCell trial = cell;
    trial.c = cell.c < c_tgt ? std::min(c_tgt, cell.c * factor)
                             : std::max(c_tgt, cell.c / factor);
    if (polish_orbit(trial, base)) {
      cell = trial;
      continue;
    }
    factor = std::sqrt(factor);
    if (factor < 1.02) return false;
  }
  return true;
}

// Walk the VP radius to r_tgt.  Returns false when the family folds first.
bool continue_radius(GainCell& cell, const ModelParams& base, double r_tgt) {
  double dr = 0.05;
  while (std::fabs(cell.vp0.r_vp - r_tgt) > 1e-9) {
    const double sign = r_tgt > cell.vp0.r_vp ? 1.0 : -1.0;
    GainCell trial = cell;
    trial.vp0.r_vp = cell.vp0.r_vp + sign * std::min(dr, std::fabs(r_tgt - cell.vp0.r_vp));
    if (polish_orbit(trial, base)) {
      cell = trial;
      continue;
    }
    dr /= 2.0;
    if (dr < 2e-3) return false;
  }
  return true;
}

// Walk the per-step drop to the cell's grade.
bool continue_grade(GainCell& cell, const ModelParams& base, double g_tgt) {
  double dg = 0.05;
  double g = cell.grade;
  while (std::fabs(g - g_tgt) > 1e-9) {
    const double sign = g_tgt > g ? 1.0 : -1.0;
    GainCell trial = cell;
    trial.grade = g + sign * std::min(dg, std::fabs(g_tgt - g));
    if (polish_orbit(trial, base)) {
      cell = trial;
      g = cell.grade;
      continue;
    }
    dg /= 2.0;
    if (dg < 2e-3) return false;
  }
  return true;
}

// Move the damping until the orbit's duty factor enters [lo, hi]; stronger
// damping drains the cycle toward a longer grounded fraction.  With
// accept_cap, a family that tops out below the band (the damping walk folds
// or hits c_max first) is kept at its largest admissible damping instead of
// failing: the cap, not the band, is the binding constraint there.
bool place_duty(GainCell& cell, const ModelParams& base, double lo, double hi,
                double c_max, bool accept_cap, bool verbose) {
  std::optional<double> duty = orbit_duty(cell, base);
  if (!duty) return false;
  double c_below = -1.0;  // damping that gave duty < lo
  double c_above = -1.0;  // damping that gave duty > hi
  bool capped = false;
  for (int i = 0; i < 40 && (*duty < lo || *duty > hi); ++i) {
    double next;
    if (*duty < lo) {
      c_below = cell.c;
      next = c_above > 0.0 ? std::sqrt(cell.c * c_above) : cell.c * 1.4;
    } else {
      c_above = cell.c;
      next = c_below > 0.0 ? std::sqrt(cell.c * c_below) : cell.c / 1.4;
    }
    if (next > c_max || next < 1.0 || std::fabs(next - cell.c) < 0.25) {
      capped = *duty < lo;
      break;
    }
    if (!continue_damping(cell, base, next)) {
      capped = *duty < lo;
      break;
    }
    duty = orbit_duty(cell, base);
    if (!duty) return false;
    if (verbose) {
      std::printf("    duty placement: c=%.0f duty=%.3f\n", cell.c, *duty);
    }
  }
  if (duty && *duty >= lo - 5e-3 && *duty <= hi + 5e-3) return true;
  if (duty && capped && accept_cap) {
    std::printf("    duty capped below band: c=%.0f duty=%.3f (band %.3f)\n",
                cell.c, *duty, lo);
    return true;
  }
  return false;
}

// Apex clearance of the anchored orbit: CoM height margin above the
// touch-down height.  Grazing anchors (margin near zero) leave the closed
// loop no room for height errors.
double orbit_clearance(const GainCell& cell, const ModelParams& base) {
  return cell.apex0.h - (base.l0 * std::sin(cell.theta_td0) +
                         base.r_H * std::cos(cell.apex0.theta));
}

// Duty placement for the body-aligned virtual point.  The VP angle trades
// flight clearance against grounded fraction along the orbit family, so the
// angle (not the damping) is the duty knob: walking it toward zero sinks the
// apex and lengthens stance.  A clearance floor keeps a real flight arc.
bool place_duty_tv(GainCell& cell, const ModelParams& base, double lo,
                   double hi, double clr_min, bool verbose) {
  std::optional<double> duty = orbit_duty(cell, base);
  if (!duty) return false;
  for (int it = 0; it < 60 && (*duty < lo - 5e-3 || *duty > hi + 5e-3);
       ++it) {
    const double dir = *duty < lo ? -1.0 : 1.0;
    GainCell trial;
    bool moved = false;
    for (double step = std::max(2e-4, 0.5 * std::fabs(cell.vp0.theta_vp));
         step > 1e-6; step /= 2) {
      trial = cell;
      trial.vp0.theta_vp += dir * step;
      if (!polish_orbit(trial, base)) continue;
      if (dir < 0.0 && orbit_clearance(trial, base) < clr_min) continue;
      moved = true;
      break;
    }
    if (!moved) break;
    cell = trial;
    duty = orbit_duty(cell, base);
    if (!duty) return false;
    if (verbose) {
      std::printf("    duty placement: tv=%+.4f duty=%.3f clr=%.3f\n",
                  cell.vp0.theta_vp, *duty,
                  orbit_clearance(cell, base));
    }
  }
  return duty && *duty >= lo - 5e-3 && *duty <= hi + 5e-3;
}

// Re-anchor the cell's stored initial state on the attractor it currently
// converges to, so later search stages start their runs near the gait they
// are scoring.  A decaying-but-not-yet-steady run is good enough to anchor
// on; the trailing-apex average beats the last apex when a small oscillation
// remains.  Also trims the pitch setpoint to the gait's own mean stance
// pitch, so the angle-error terms carry no standing bias into the leg-angle
// integrator.  Keeps the old state when the loop is still wandering.
bool try_recenter(GainCell& cell, const ModelParams& base,
                  const TuneSettings& ts) {
  const int n_run = 2 * ts.n_steps;
  const GaitResult g =
      run_cell(cell, base, cell_terrain(cell), n_run, ts.integ);
  const int n = static_cast<int>(g.steps.size());
  if (g.status != StepStatus::Ok || n != n_run ||
      g.convergence.deltas.back() > 3e-2) {
    return false;
  }
  ApexState mean{};
  const int k0 = n - 5;
  for (int i = k0; i < n; ++i) {
    const ApexState a = apex_state_of(g.steps[i]);
    mean.h += a.h / 5.0;
    mean.xdot += a.xdot / 5.0;
    mean.theta += a.theta / 5.0;
    mean.thetadot += a.thetadot / 5.0;
  }
  cell.apex0 = mean;
  const StepRecord& last = g.steps.back();
  cell.theta_td0 = last.step.controls.theta_td;
  cell.vp0 = last.step.controls.vp;
  cell.gains.theta_c_des = observe(g.steps).theta_mean_stance;
  return true;
}

// Run the closed loop from the cell's stored state and freeze the trailing
// fixed point back into it.  Returns false when the gait does not settle.
bool verify_and_freeze(GainCell& cell, const ModelParams& base, int n_steps,
                       bool verbose) {
  const GaitResult g =
      run_cell(cell, base, cell_terrain(cell), n_steps, freeze_integ());
  const bool ok = g.status == StepStatus::Ok && g.convergence.steady &&
                  static_cast<int>(g.steps.size()) == n_steps &&
                  g.convergence.period == 1;
  if (!ok) {
    if (verbose) {
      std::printf("    verify failed: status=%d steps=%zu steady=%d period=%d\n",
                  static_cast<int>(g.status), g.steps.size(),
                  static_cast<int>(g.convergence.steady), g.convergence.period);
    }
    return false;
  }
  const StepRecord& last = g.steps.back();
  const ApexState a = apex_state_of(last);
  cell.apex0 = a;
  cell.theta_td0 = last.step.controls.theta_td;
  cell.vp0 = last.step.controls.vp;
  cell.duty = duty_factor(g.steps);
  cell.conv_delta = g.convergence.deltas.back();
  if (verbose) {
    std::printf(
        "    frozen: h=%.4f xdot=%.4f th=%+.4f thd=%+.4f ttd=%.4f r=%+.3f "
        "duty=%.3f delta=%.2e\n",
        a.h, a.xdot, a.theta, a.thetadot, cell.theta_td0, cell.vp0.r_vp,
        cell.duty, cell.conv_delta);
  }
  return true;
}

void print_gains(const GainCell& cell) {
  std::printf(
      "    gains: k_y=%.3g k_xd0=%.3g k_xd=%.3g k_th=%.3g k_thb=%.3g "
      "k_rvp=%.3g k_thvp=%.3g score=%.3f\n",
      cell.gains.k_y, cell.gains.k_xdot0, cell.gains.k_xdot,
      cell.gains.k_theta, cell.gains.k_thetabar, cell.gains.k_rvp,
      cell.gains.k_thetavp, cell.conv_delta);
}

}  // namespace

int run_tune(const TuneOptions& opt) {
  std::vector<Target> targets = make_targets();
  if (!opt.filter.empty()) {
    std::vector<Target> kept;
    for (const Target& t : targets) {
      if (t.name.find(opt.filter) != std::string::npos) kept.push_back(t);
    }
    targets = kept;
  }
  if (opt.quick && targets.size() > 1) targets.resize(1);
  if (targets.empty()) {
    std::fprintf(stderr, "tune: no cells match filter '%s'\n",
                 opt.filter.c_str());
    return 1;
  }

  const ModelParams base;  // damping applied per cell
  TuneSettings ts;
  ts.integ = search_integ();
  ts.n_steps = opt.quick ? 40 : 60;
  ts.sweeps = opt.quick ? 1 : 2;
  const int n_verify = opt.quick ? 60 : 100;

  GainTable table;
  // Tuned level cells double as the launching point for the downhill cells.
  std::map<std::pair<char, int>, GainCell> level_cells;

  const auto tune_level = [&](const Target& t) -> std::optional<GainCell> {
    std::optional<GainCell> cell = seed_level_cell(t, base);
    if (!cell) {
      std::printf("  %-12s FAILED (no spring-mass seed)\n", t.name.c_str());
      return std::nullopt;
    }
    // Carry the orbit out to the target radius.  Where the family folds at
    // the current damping, return to the (always solvable) on-CoM orbit,
    // double the damping there, and re-walk the whole leg: a stronger damper
    // keeps the grounded branch alive past the fold, and the centered orbit
    // is a far better launch point than the fold neighborhood.
    const double r_tgt = t.side == 'A' ? 0.30 : -0.30;
    // The body-aligned family is walked in the world frame first: the two
    // frames coincide for an upright trunk, and the world-frame family is
    // the one that stays regular out to the full radius.
    if (t.side == 'A') cell->vp0.frame = VpFrame::WorldVertical;
    GainCell at_zero = *cell;
    bool reached = false;
    while (!reached) {
      GainCell walk = at_zero;
      reached = continue_radius(walk, base, r_tgt);
      if (opt.verbose) {
        std::printf("    radius walk: c=%.0f -> r=%+.3f%s\n", walk.c,
                    walk.vp0.r_vp, reached ? "" : " (fold)");
      }
      if (reached) {
        *cell = walk;
        break;
      }
      if (at_zero.c >= 0.45 * ts.c_max) {
        std::printf("  %-12s FAILED (orbit family folds before the radius "
                    "target)\n",
                    t.name.c_str());
        return std::nullopt;
      }
      if (!continue_damping(at_zero, base,
                            std::min(ts.c_max, at_zero.c * 2.0))) {
        std::printf("  %-12s FAILED (damping fold on the centered orbit)\n",
                    t.name.c_str());
        return std::nullopt;
      }
    }
    duty_band(t.side, t.speed, 0.0, ts.duty_lo, ts.duty_hi);
    if (t.side == 'A') {
      // Hop to the body-aligned frame.  Tilting the VP direction by the mean
      // stance pitch reproduces the world-frame orbit to first order; the
      // residual angle is the trim that lets the hip replace the damper loss.
      const double thbar = orbit_stance_pitch(*cell, base);
      GainCell hopped = *cell;
      hopped.vp0.frame = VpFrame::BodyAligned;
      hopped.vp0.theta_vp = -thbar;
      if (!polish_orbit(hopped, base)) {
        std::printf("  %-12s FAILED (frame hop)\n", t.name.c_str());
        return std::nullopt;
      }
      *cell = hopped;
      if (!place_duty_tv(*cell, base, ts.duty_lo, ts.duty_hi, 0.008,
                         opt.verbose)) {
        std::printf("  %-12s FAILED (duty placement)\n", t.name.c_str());
        return std::nullopt;
      }
    } else {
      // Damping places the duty factor on the orbit: a stronger damper
      // drains the cycle toward a longer grounded fraction.
      if (!place_duty(*cell, base, ts.duty_lo, ts.duty_hi, ts.c_max,
                      opt.verbose)) {
        std::printf("  %-12s FAILED (duty placement)\n", t.name.c_str());
        return std::nullopt;
      }
    }
    // The anchor now sits on the target orbit; search the gains that hold
    // the closed loop on it.
    cell->gains.r_vp_des = r_tgt;
    cell->gains.theta_vp_des = cell->vp0.theta_vp;
    cell->gains.theta_c_des = orbit_stance_pitch(*cell, base);
    *cell = search_gains(*cell, base, ts);
    try_recenter(*cell, base, ts);
    if (opt.verbose) print_gains(*cell);
    if (!verify_and_freeze(*cell, base, n_verify, opt.verbose)) {
      std::printf("  %-12s FAILED (closed loop did not settle)\n",
                  t.name.c_str());
      return std::nullopt;
    }
    level_cells[{t.side, static_cast<int>(t.speed * 10)}] = *cell;
    return cell;
  };

  int failures = 0;
  for (const Target& t : targets) {
    if (opt.verbose) std::printf("[tune] %s\n", t.name.c_str());

    if (t.grade == 0.0) {
      if (tune_level(t)) {
        table.cells.push_back(
            level_cells[{t.side, static_cast<int>(t.speed * 10)}]);
      } else {
        ++failures;
      }
      continue;
    }

    // Downhill: continue from the tuned level gait of the same speed.
    const auto key = std::make_pair(t.side, static_cast<int>(t.speed * 10));
    if (level_cells.find(key) == level_cells.end()) {
      Target lt = t;
      lt.grade = 0.0;
      lt.name = "(level seed)";
      if (!tune_level(lt)) {
        std::printf("  %-12s FAILED (no level gait to continue from)\n",
                    t.name.c_str());
        ++failures;
        continue;
      }
    }
    GainCell cell = level_cells[key];
    // Carry the level orbit down the slope, then re-place the duty factor:
    // the descent feeds energy into every step, so the damping must grow
    // with the grade to keep the cycle in its band.
    GainCell carried = cell;
    carried.grade = 0.0;
    if (!continue_grade(carried, base, t.grade)) {
      std::printf("  %-12s FAILED (orbit family folds before the grade "
                  "target)\n",
                  t.name.c_str());
      ++failures;
      continue;
    }
    cell = carried;
    duty_band(t.side, t.speed, t.grade, ts.duty_lo, ts.duty_hi);
    if (!place_duty(cell, base, ts.duty_lo, ts.duty_hi, ts.c_max,
                    opt.verbose)) {
      std::printf("  %-12s FAILED (duty placement)\n", t.name.c_str());
      ++failures;
      continue;
    }
    if (opt.verbose) {
      std::printf("    grade carried: c=%.0f h0=%.4f ttd0=%.4f\n", cell.c,
                  cell.apex0.h, cell.theta_td0);
    }
    cell.gains.theta_c_des = orbit_stance_pitch(cell, base);
    cell = search_gains(cell, base, ts);
    try_recenter(cell, base, ts);
    if (opt.verbose) print_gains(cell);

    if (!verify_and_freeze(cell, base, n_verify, opt.verbose)) {
      std::printf("  %-12s FAILED (closed loop did not settle)\n",
                  t.name.c_str());
      ++failures;
      continue;
    }
    table.cells.push_back(cell);
  }

  if (!table.cells.empty()) {
    namespace fs = std::filesystem;
    const fs::path out(opt.out_path);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    save_gain_table(opt.out_path, table);
    std::printf("[tune] wrote %zu cells to %s\n", table.cells.size(),
                opt.out_path.c_str());
  }
  if (failures > 0) {
    std::printf("[tune] %d cell(s) failed\n", failures);
    return 2;
  }
  return 0;
}

}  // namespace tslip::cli
