#include "tslip/tuning.hpp"

#include "tslip/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace tslip {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Apex-height return defect of one conservative step, NaN when the step does
// not complete cleanly.
double slip_height_defect(const ModelParams& p, double speed,
                          double apex_height, double theta_td,
                          const IntegratorSettings& set) {
  BodyState apex;
  apex.y = apex_height;
  apex.xdot = speed;
  StepControls ctl;
  ctl.theta_td = theta_td;
  ctl.vp = VpConfig{0.0, 0.0, VpFrame::WorldVertical};
  const StepResult r = simulate_step(apex, ctl, p, 0.0, set);
  if (r.status != StepStatus::Ok || r.degenerate_aerial) return kNan;
  return r.apex_out.y - apex_height;
}

}  // namespace

std::optional<SlipFixedPoint> find_slip_fixed_point(
    const ModelParams& p, double speed, double apex_height,
    const IntegratorSettings& set, SlipBranch branch) {
  ModelParams q = p;
  q.c = 0.0;   // conservative regime by definition
  q.r_H = 0.0; // hip on the CoM: the torque path carries no power

  // Scan for sign changes of the apex-height return defect.
  constexpr int kScan = 48;
  const double lo = 0.75, hi = 1.55;
  double prev_th = kNan, prev_f = kNan;
  std::vector<std::pair<double, double>> brackets;
  for (int i = 0; i < kScan; ++i) {
    const double th = lo + (hi - lo) * i / (kScan - 1);
    const double f = slip_height_defect(q, speed, apex_height, th, set);
    if (std::isfinite(f) && std::isfinite(prev_f) &&
        ((f < 0.0) != (prev_f < 0.0))) {
      brackets.emplace_back(prev_th, th);
    }
    prev_th = th;
    prev_f = f;
  }
  if (brackets.empty()) return std::nullopt;

  double blo = kNan, bhi = kNan;
  if (branch == SlipBranch::Flat && brackets.size() > 1) {
    // Several fixed points usually coexist.  The steepest grazes the ground
    // with a vanishing aerial phase; the running gait is the root whose
    // contact pattern looks like running, so rank the roots by how close
    // their duty factor is to 0.3 and demand a genuine aerial phase.
    double best_rank = std::numeric_limits<double>::infinity();
    for (const auto& [brlo, brhi] : brackets) {
      const double th = 0.5 * (brlo + brhi);
      BodyState apex;
      apex.y = apex_height;
      apex.xdot = speed;
      StepControls ctl;
      ctl.theta_td = th;
      ctl.vp = VpConfig{0.0, 0.0, VpFrame::WorldVertical};
      const StepResult r = simulate_step(apex, ctl, q, 0.0, set);
      if (r.status != StepStatus::Ok || r.degenerate_aerial) continue;
      if (r.t_td < 0.02 || r.step_time <= 0.0) continue;  // no real flight
      const double duty = (r.t_to - r.t_td) / r.step_time;
      const double rank = std::abs(duty - 0.3);
      if (rank < best_rank) {
        best_rank = rank;
        blo = brlo;
        bhi = brhi;
      }
    }
  }
  if (!std::isfinite(blo)) {
    blo = brackets.back().first;
    bhi = brackets.back().second;
  }

  double flo = slip_height_defect(q, speed, apex_height, blo, set);
  for (int it = 0; it < 200 && bhi - blo > 1e-14; ++it) {
    const double mid = 0.5 * (blo + bhi);
    const double fm = slip_height_defect(q, speed, apex_height, mid, set);
    if (!std::isfinite(fm)) return std::nullopt;
    if ((fm < 0.0) == (flo < 0.0)) {
      blo = mid;
      flo = fm;
    } else {
      bhi = mid;
    }
  }

  SlipFixedPoint fp;
  fp.theta_td = 0.5 * (blo + bhi);
  fp.apex.y = apex_height;
  fp.apex.xdot = speed;
  return fp;
}

ModelParams cell_params(const GainCell& cell, const ModelParams& base) {
  ModelParams p = base;
  p.c = cell.c;
  return p;
}

StepControls cell_controls(const GainCell& cell) {
  StepControls sc;
  sc.theta_td = cell.theta_td0;
  sc.vp = cell.vp0;
  return sc;
}

BodyState cell_apex(const GainCell& cell, double ground_y) {
  BodyState b;
  b.y = ground_y + cell.apex0.h;
  b.xdot = cell.apex0.xdot;
  b.theta = cell.apex0.theta;
  b.thetadot = cell.apex0.thetadot;
  return b;
}

namespace {

// Return-map residual for the periodic-gait search.  Unknowns:
// (h, xdot, theta, thetadot, theta_td); residuals are the apex-state return
// defect in terrain-relative coordinates plus the speed constraint.  Keeping
// the touch-down angle inside the solve lets Newton slide along the orbit
// family tangent, which is what makes warm-started continuation robust.
struct MapEval {
  std::array<double, 5> r{};
  bool ok = false;
};

MapEval periodic_residual(const std::array<double, 5>& u, const ModelParams& p,
                          double speed, double dy_gnd, const VpConfig& vp,
                          const IntegratorSettings& set) {
  MapEval out;
  BodyState apex;
  apex.y = u[0];
  apex.xdot = u[1];
  apex.theta = u[2];
  apex.thetadot = u[3];
  if (u[4] <= 0.05 || u[4] >= 1.56 || u[0] <= 0.2) return out;
  StepControls ctl;
  ctl.theta_td = u[4];
  ctl.vp = vp;
  const StepResult res = simulate_step(apex, ctl, p, 0.0, set);
  if (res.status != StepStatus::Ok || res.degenerate_aerial ||
      res.early_grf_cutoff) {
    return out;
  }
  out.r[0] = (res.apex_out.y - dy_gnd) - u[0];
  out.r[1] = res.apex_out.xdot - u[1];
  out.r[2] = res.apex_out.theta - u[2];
  out.r[3] = res.apex_out.thetadot - u[3];
  out.r[4] = u[1] - speed;
  out.ok = true;
  return out;
}

double inf_norm(const std::array<double, 5>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Solve the 5x5 system J dx = -r by Gaussian elimination with partial
// pivoting.  Returns false on a (near-)singular Jacobian.
bool solve5(std::array<std::array<double, 5>, 5> J, std::array<double, 5> r,
            std::array<double, 5>& dx) {
  for (int col = 0; col < 5; ++col) {
    int piv = col;
    for (int i = col + 1; i < 5; ++i) {
      if (std::abs(J[i][col]) > std::abs(J[piv][col])) piv = i;
    }
    if (std::abs(J[piv][col]) < 1e-14) return false;
    std::swap(J[piv], J[col]);
    std::swap(r[piv], r[col]);
    for (int i = col + 1; i < 5; ++i) {
      const double f = J[i][col] / J[col][col];
      for (int j = col; j < 5; ++j) J[i][j] -= f * J[col][j];
      r[i] -= f * r[col];
    }
  }
  for (int i = 4; i >= 0; --i) {
    double s = -r[i];
    for (int j = i + 1; j < 5; ++j) s -= J[i][j] * dx[j];
    dx[i] = s / J[i][i];
  }
  return true;
}

}  // namespace

PeriodicGait find_periodic_gait(const ModelParams& p, double speed,
                                double dy_gnd, const VpConfig& vp,
                                double theta_td0, const BodyState& apex0,
                                const IntegratorSettings& set) {
  PeriodicGait out;
  out.vp = vp;

  std::array<double, 5> u = {apex0.y, apex0.xdot, apex0.theta, apex0.thetadot,
                             theta_td0};
  MapEval cur = periodic_residual(u, p, speed, dy_gnd, vp, set);
  if (!cur.ok) return out;

  for (int iter = 0; iter < 40; ++iter) {
    const double rn = inf_norm(cur.r);
    if (rn < 1e-10) break;

    // Forward-difference Jacobian, columns evaluated concurrently.
    std::array<std::array<double, 5>, 5> J{};
    std::array<std::future<MapEval>, 5> cols;
    std::array<double, 5> eps{};
    for (int j = 0; j < 5; ++j) {
      eps[j] = 1e-7 * std::max(1.0, std::abs(u[j]));
      std::array<double, 5> up = u;
      up[j] += eps[j];
      cols[j] = std::async(std::launch::async, periodic_residual, up, p, speed,
                           dy_gnd, vp, set);
    }
    bool jac_ok = true;
    for (int j = 0; j < 5; ++j) {
      const MapEval pe = cols[j].get();
      if (!pe.ok) {
        jac_ok = false;
        continue;
      }
      for (int i = 0; i < 5; ++i) J[i][j] = (pe.r[i] - cur.r[i]) / eps[j];
    }
    std::array<double, 5> dx{};
    if (!jac_ok || !solve5(J, cur.r, dx)) break;

    // Damped update: halve until the residual actually drops.
    double lambda = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 8; ++ls, lambda *= 0.5) {
      std::array<double, 5> un = u;
      for (int j = 0; j < 5; ++j) un[j] += lambda * dx[j];
      const MapEval ne = periodic_residual(un, p, speed, dy_gnd, vp, set);
      if (ne.ok && inf_norm(ne.r) < rn) {
        u = un;
        cur = ne;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  out.residual = inf_norm(cur.r);
  out.found = cur.ok && out.residual < 1e-8;
  out.apex.y = u[0];
  out.apex.xdot = u[1];
  out.apex.theta = u[2];
  out.apex.thetadot = u[3];
  out.theta_td = u[4];
  return out;
}

GaitResult run_cell(const GainCell& cell, const ModelParams& p,
                    const TerrainSpec& terrain, int n_steps,
                    const IntegratorSettings& set) {
  const int sd =
      terrain.kind == TerrainSpec::Kind::SingleStepDown ? terrain.at_step : -1;
  const ApexController ctrl(cell.gains, cell_controls(cell), sd);
  GaitOptions opt;
  opt.n_steps = n_steps;
  const ControlsFn fn = [&ctrl](int k, const std::vector<StepRecord>& done) {
    return ctrl.controls_for_step(k, done);
  };
  return simulate_gait(cell_apex(cell, ground_level(terrain, 0)), fn,
                       cell_params(cell, p), terrain, opt, set);
}

namespace {

// Stability score of one closed-loop gait run: lower is better.  Falls are
// heavily penalized but graded by survival time so the search has gradient;
// converged runs are ranked by trailing apex defect, speed error, period,
// and trunk excursion.
double score_run(const GaitResult& g, const TuneSettings& ts, double xdot_des,
                 int n_steps) {
  const int done = static_cast<int>(g.steps.size());
  if (g.status != StepStatus::Ok || done < n_steps) {
    return 1.0e3 - 10.0 * done / std::max(1, n_steps);
  }
  double s = 0.0;
  // Trailing apex-defect sum: near zero once the gait has settled, smoothly
  // larger for slow convergence or a residual limit cycle, so the search
  // sees a gradient long before the strict steady flag trips.
  double sum10 = 0.0;
  const int nd = static_cast<int>(g.convergence.deltas.size());
  for (int i = std::max(1, nd - 10); i < nd; ++i) {
    sum10 += g.convergence.deltas[i];
  }
  s += std::min(100.0, 20.0 * sum10);
  if (!g.convergence.steady) {
    s += 20.0;
  } else if (g.convergence.period != 1) {
    s += 5.0 * g.convergence.period;
  }
  const ApexState last = apex_state_of(g.steps.back());
  s += 2.0 * std::abs(last.xdot - xdot_des);
  double max_th = 0.0;
  int cutoffs = 0;
  for (const auto& rec : g.steps) {
    max_th = std::max(max_th, std::abs(rec.step.apex_out.theta));
    if (rec.step.early_grf_cutoff) ++cutoffs;
  }
  s += (max_th > 0.6 ? 10.0 * (max_th - 0.6) : 0.0);
  s += 0.5 * cutoffs;
  // Steer toward the experiment's duty-factor band.
  const double duty = duty_factor(g.steps);
  if (duty < ts.duty_lo) s += 30.0 * (ts.duty_lo - duty);
  if (duty > ts.duty_hi) s += 30.0 * (duty - ts.duty_hi);
  return s;
}

struct Probe {
  double dh = 0.0;
  double dv = 0.0;
  double dth = 0.0;
};

double score_cell(const GainCell& cell, const ModelParams& p,
                  const TuneSettings& ts, const TerrainSpec& terrain) {
  const std::array<Probe, 4> probes = {
      Probe{0.0, 0.0, 0.0},
      Probe{ts.probe_height, 0.0, 0.0},
      Probe{0.0, -ts.probe_speed, 0.0},
      Probe{0.0, 0.0, ts.probe_pitch},
  };
  double total = 0.0;
  for (const Probe& pr : probes) {
    GainCell kicked = cell;
    kicked.apex0.h += pr.dh;
    kicked.apex0.xdot += pr.dv;
    kicked.apex0.theta += pr.dth;
    const GaitResult g = run_cell(kicked, p, terrain, ts.n_steps, ts.integ);
    total += score_run(g, ts, cell.gains.xdot_des, ts.n_steps);
  }
  return total;
}

}  // namespace

GainCell search_gains(const GainCell& seed_cell, const ModelParams& p,
                      const TuneSettings& ts) {
  TerrainSpec terrain;
  if (seed_cell.grade != 0.0) {
    terrain.kind = TerrainSpec::Kind::ConstantDecline;
    terrain.dy_gnd = -std::abs(seed_cell.grade);
  }

  struct Axis {
    double ControllerGains::* field;
    std::vector<double> values;
  };
  const std::vector<Axis> axes = {
      {&ControllerGains::k_y,
       {0.0, 0.03, 0.05, 0.08, 0.1, 0.15, 0.2, 0.35, 0.5, -0.05, -0.1, -0.2}},
      {&ControllerGains::k_xdot0,
       {0.0, 0.02, 0.05, 0.08, 0.1, 0.15, 0.2, 0.3, -0.02, -0.05, -0.1, -0.2}},
      {&ControllerGains::k_xdot,
       {0.0, 0.02, 0.05, 0.1, -0.02, -0.05, -0.1}},
      {&ControllerGains::k_theta, {0.0, 0.1, 0.3, 0.6, -0.1, -0.3, -0.6}},
      {&ControllerGains::k_thetabar,
       {0.0, 0.1, 0.3, 0.6, 1.0, -0.1, -0.3, -0.6, -1.0}},
      {&ControllerGains::k_rvp, {0.0, 0.02, 0.05, 0.1, 0.2, 0.4}},
      {&ControllerGains::k_thetavp, {0.0, 0.1, 0.3, 0.6, -0.1, -0.3, -0.6}},
  };

  GainCell best = seed_cell;
  double best_score = score_cell(best, p, ts, terrain);

  const auto take_best = [&](const std::vector<GainCell>& cands) {
    std::vector<std::future<double>> scores;
    scores.reserve(cands.size());
    for (const GainCell& c : cands) {
      scores.push_back(
          std::async(std::launch::async, score_cell, c, p, ts, terrain));
    }
    // Ties and completion order cannot affect the outcome (pick by score,
    // then by candidate index).
    for (size_t i = 0; i < cands.size(); ++i) {
      const double s = scores[i].get();
      if (s < best_score - 1e-12) {
        best_score = s;
        best = cands[i];
      }
    }
  };

  for (int sweep = 0; sweep < ts.sweeps; ++sweep) {
    // The apex-height and speed gains set the energy equilibrium together;
    // one alone mostly shifts the operating point, so search them as a pair.
    {
      const std::vector<double> ky = {0.0, 0.03, 0.08, 0.15, 0.3};
      const std::vector<double> kx = {0.0, 0.05, 0.1, 0.2, 0.3};
      std::vector<GainCell> cands;
      for (double a : ky) {
        for (double b : kx) {
          GainCell c = best;
          c.gains.k_y = a;
          c.gains.k_xdot0 = b;
          cands.push_back(c);
        }
      }
      take_best(cands);
    }
    for (const Axis& ax : axes) {
      std::vector<GainCell> cands;
      for (double v : ax.values) {
        GainCell c = best;
        c.gains.*ax.field = v;
        cands.push_back(c);
      }
      take_best(cands);
    }
    // The trunk-posture gains act as a position/rate pair on the pitch map
    // and rarely help one at a time, so explore them jointly.
    {
      const std::vector<double> vals = {0.0, 0.1,  0.3,  0.6,
                                        -0.1, -0.3, -0.6};
      std::vector<GainCell> cands;
      for (double a : vals) {
        for (double b : vals) {
          GainCell c = best;
          c.gains.k_thetabar = a;
          c.gains.k_thetavp = b;
          cands.push_back(c);
        }
      }
      take_best(cands);
    }
  }
  best.conv_delta = best_score;
  return best;
}

std::optional<double> tune_damping(const GainCell& cell, const ModelParams& p,
                                   const TuneSettings& ts, double c_lo) {
  TerrainSpec terrain;
  if (cell.grade != 0.0) {
    terrain.kind = TerrainSpec::Kind::ConstantDecline;
    terrain.dy_gnd = -std::abs(cell.grade);
  }

  const auto admissible = [&](double c) {
    GainCell cand = cell;
    cand.c = c;
    const GaitResult g = run_cell(cand, p, terrain, ts.n_steps, ts.integ);
    if (g.status != StepStatus::Ok ||
        static_cast<int>(g.steps.size()) < ts.n_steps ||
        !g.convergence.steady) {
      return false;
    }
    const int tail = std::max(0, static_cast<int>(g.steps.size()) - 10);
    for (size_t i = tail; i < g.steps.size(); ++i) {
      if (g.steps[i].step.early_grf_cutoff) return false;
    }
    double duty = 0.0;
    try {
      duty = duty_factor(g.steps, -1);
    } catch (...) {
      return false;
    }
    return duty >= ts.duty_lo && duty <= ts.duty_hi;
  };

  if (!admissible(c_lo)) return std::nullopt;
  double lo = c_lo;
  double hi = c_lo;
  // Grow until inadmissible (or the cap, which is then the answer).
  for (int i = 0; i < 24; ++i) {
    hi = std::min(ts.c_max, std::max(2.0 * hi, 25.0));
    if (!admissible(hi)) break;
    lo = hi;
    if (hi >= ts.c_max) return ts.c_max;
  }
  for (int i = 0; i < 24 && hi - lo > 0.5; ++i) {
    const double mid = 0.5 * (lo + hi);
    (admissible(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace tslip
