#include "tslip/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "tslip/dynamics.hpp"

namespace tslip {
namespace {

std::vector<const TrajectorySample*> stance_view(const StepResult& step) {
  std::vector<const TrajectorySample*> v;
  for (const TrajectorySample& s : step.trajectory) {
    if (s.phase == Phase::Stance) v.push_back(&s);
  }
  if (v.size() < 2) throw NoStanceError();
  return v;
}

double kinetic(const BodyState& s, const ModelParams& p) {
  return 0.5 * p.m * (s.xdot * s.xdot + s.ydot * s.ydot) +
         0.5 * p.J * s.thetadot * s.thetadot;
}

// Hermite basis on [0,1].
void hermite_weights(double u, double h, double& h00, double& h10, double& h01,
                     double& h11) {
  const double u2 = u * u, u3 = u2 * u;
  h00 = 2 * u3 - 3 * u2 + 1;
  h10 = (u3 - 2 * u2 + u) * h;
  h01 = -2 * u3 + 3 * u2;
  h11 = (u3 - u2) * h;
}

struct Powers {
  double p_spring, p_damper, p_hip, p_wrench;
};

Powers sample_powers(const TrajectorySample& ts, const StepResult& step,
                     const ModelParams& p) {
  const StanceGeometry g =
      leg_kinematics(ts.state, step.foot, p, step.controls.vp);
  const ForceBreakdown& f = ts.forces;
  Powers w;
  w.p_spring = f.f_sp * g.ldot;
  w.p_damper = f.f_dp * g.ldot;
  w.p_hip = f.tau_h * (ts.state.thetadot - g.alpha_dot);
  w.p_wrench = dot(f.f_total, ts.state.com_vel()) +
               ts.state.thetadot * cross(step.foot - ts.state.com(), f.f_total);
  return w;
}

}  // namespace

std::vector<TrajectorySample> resample_stance(const StepResult& step,
                                              const ModelParams& p,
                                              int n_min) {
  const auto view = stance_view(step);
  std::vector<TrajectorySample> out;
  if (static_cast<int>(view.size()) >= n_min) {
    out.reserve(view.size());
    for (const auto* s : view) out.push_back(*s);
    return out;
  }

  const double t0 = view.front()->t, t1 = view.back()->t;
  out.reserve(n_min);
  std::size_t seg = 0;
  for (int i = 0; i < n_min; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / (n_min - 1);
    while (seg + 2 < view.size() && view[seg + 1]->t < t) ++seg;
    const TrajectorySample& a = *view[seg];
    const TrajectorySample& b = *view[seg + 1];
    const double h = b.t - a.t;
    TrajectorySample ts;
    ts.t = t;
    ts.phase = Phase::Stance;
    if (h <= 0.0) {
      ts.state = a.state;
    } else {
      const double u = std::clamp((t - a.t) / h, 0.0, 1.0);
      // positions from states+velocities, velocities from velocities+accels
      const StateVec da = stance_derivatives(a.state, step.foot, p,
                                             step.controls.vp)
                              .dstate;
      const StateVec db = stance_derivatives(b.state, step.foot, p,
                                             step.controls.vp)
                              .dstate;
      const StateVec ya = pack(a.state), yb = pack(b.state);
      double h00, h10, h01, h11;
      hermite_weights(u, h, h00, h10, h01, h11);
      StateVec y;
      for (int c = 0; c < 6; ++c)
        y[c] = h00 * ya[c] + h10 * da[c] + h01 * yb[c] + h11 * db[c];
      ts.state = unpack(y);
    }
    ts.forces = stance_forces(
        leg_kinematics(ts.state, step.foot, p, step.controls.vp), p);
    out.push_back(ts);
  }
  return out;
}

GrfProfile grf_profiles(const StepResult& step, const ModelParams& p,
                        int n_min) {
  const auto samples = resample_stance(step, p, n_min);
  const double bw = p.m * p.g;
  const double T = step.step_time;
  GrfProfile prof;
  prof.stance_begin_pct = 100.0 * step.t_td / T;
  prof.stance_end_pct = 100.0 * step.t_to / T;

  double t_peak = samples.front().t;
  double brake_time = 0.0, prop_time = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    prof.series.push_back(
        {100.0 * s.t / T, s.forces.f_total.x / bw, s.forces.f_total.y / bw});
    if (s.forces.f_total.y / bw > prof.peak_vgrf_bw) {
      prof.peak_vgrf_bw = s.forces.f_total.y / bw;
      t_peak = s.t;
    }
    prof.peak_brake_bw = std::min(prof.peak_brake_bw, s.forces.f_total.x / bw);
    prof.peak_prop_bw = std::max(prof.peak_prop_bw, s.forces.f_total.x / bw);
    if (i > 0) {
      const double dt = s.t - samples[i - 1].t;
      const double fx_mid = 0.5 * (s.forces.f_total.x +
                                   samples[i - 1].forces.f_total.x);
      (fx_mid < 0.0 ? brake_time : prop_time) += dt;
    }
  }
  prof.t_peak_vgrf_pct = 100.0 * t_peak / T;
  const double stance_dur = step.t_to - step.t_td;
  prof.brake_time_frac = brake_time / stance_dur;
  prof.prop_time_frac = prop_time / stance_dur;
  prof.vgrf_skew = (t_peak - 0.5 * (step.t_td + step.t_to)) / stance_dur;
  return prof;
}

Impulses impulses(const StepResult& step, const ModelParams& p, int n_min) {
  const auto samples = resample_stance(step, p, n_min);
  double iv = 0.0, ib = 0.0, ip = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const auto& a = samples[i - 1];
    const auto& b = samples[i];
    const double dt = b.t - a.t;
    iv += 0.5 * (a.forces.f_total.y + b.forces.f_total.y) * dt;
    const double fxa = a.forces.f_total.x, fxb = b.forces.f_total.x;
    ib += 0.5 * (std::min(fxa, 0.0) + std::min(fxb, 0.0)) * dt;
    ip += 0.5 * (std::max(fxa, 0.0) + std::max(fxb, 0.0)) * dt;
  }
  const double scale = p.m * p.g * step.step_time;
  return {iv / scale, ib / scale, ip / scale, (ib + ip) / scale};
}

WorkBreakdown work_decomposition(const StepResult& step, const ModelParams& p,
                                 int n_min) {
  const auto samples = resample_stance(step, p, n_min);
  WorkBreakdown w;
  Powers prev = sample_powers(samples.front(), step, p);
  w.t_pct.push_back(100.0 * samples.front().t / step.step_time);
  w.p_spring.push_back(prev.p_spring);
  w.p_damper.push_back(prev.p_damper);
  w.p_hip.push_back(prev.p_hip);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const Powers cur = sample_powers(samples[i], step, p);
    const double dt = samples[i].t - samples[i - 1].t;
    w.w_spring += 0.5 * (prev.p_spring + cur.p_spring) * dt;
    w.w_damper += 0.5 * (prev.p_damper + cur.p_damper) * dt;
    const double hip_inc = 0.5 * (prev.p_hip + cur.p_hip) * dt;
    w.w_hip += hip_inc;
    (hip_inc < 0.0 ? w.w_hip_neg : w.w_hip_pos) += hip_inc;
    w.w_grf += 0.5 * (prev.p_wrench + cur.p_wrench) * dt;
    w.t_pct.push_back(100.0 * samples[i].t / step.step_time);
    w.p_spring.push_back(cur.p_spring);
    w.p_damper.push_back(cur.p_damper);
    w.p_hip.push_back(cur.p_hip);
    prev = cur;
  }
  w.dE_kin = kinetic(step.apex_out, p) - kinetic(step.apex_in, p);
  w.dE_pot = p.m * p.g * (step.apex_out.y - step.apex_in.y);
  w.residual = (w.dE_kin + w.dE_pot) - (w.w_spring + w.w_damper + w.w_hip);
  return w;
}

double duty_factor(const std::vector<StepRecord>& steps, int from) {
  if (steps.empty()) throw NoStanceError();
  const int n = static_cast<int>(steps.size());
  if (from < 0) from = std::max(0, n - 10);
  from = std::min(from, n - 1);
  double acc = 0.0;
  int cnt = 0;
  for (int i = from; i < n; ++i) {
    const StepResult& s = steps[i].step;
    if (s.status != StepStatus::Ok) continue;
    acc += (s.t_to - s.t_td) / (2.0 * s.step_time);
    ++cnt;
  }
  if (cnt == 0) throw NoStanceError();
  return acc / cnt;
}

VpEstimate estimate_vp(const StepResult& step, const ModelParams& p,
                       double min_force_bw) {
  const auto view = stance_view(step);
  const double fmin = min_force_bw * p.m * p.g;
  const bool body_frame = step.controls.vp.frame == VpFrame::BodyAligned;

  double a11 = 0.0, a12 = 0.0, a22 = 0.0, b1 = 0.0, b2 = 0.0;
  int n = 0;
  double res_base = 0.0;
  struct Line {
    Vec2 q, nrm;
  };
  std::vector<Line> lines;
  for (const auto* s : view) {
    const Vec2 F = s->forces.f_total;
    const double fn = F.norm();
    if (fn < fmin) continue;
    Vec2 q = step.foot - s->state.com();
    Vec2 d = F / fn;
    if (body_frame) {
      const double ct = std::cos(-s->state.theta), st = std::sin(-s->state.theta);
      q = {ct * q.x - st * q.y, st * q.x + ct * q.y};
      d = {ct * d.x - st * d.y, st * d.x + ct * d.y};
    }
    const Vec2 nrm = perp(d);
    a11 += nrm.x * nrm.x;
    a12 += nrm.x * nrm.y;
    a22 += nrm.y * nrm.y;
    const double nq = dot(nrm, q);
    b1 += nrm.x * nq;
    b2 += nrm.y * nq;
    lines.push_back({q, nrm});
    ++n;
  }
  if (n < 3) throw DegenerateLinesError();

  const double det = a11 * a22 - a12 * a12;
  const double tr = 0.5 * (a11 + a22);
  if (!(det > 1e-10 * tr * tr)) throw DegenerateLinesError();

  VpEstimate est;
  est.point = {(a22 * b1 - a12 * b2) / det, (a11 * b2 - a12 * b1) / det};
  est.n_lines = n;
  for (const Line& L : lines) {
    const double d = dot(L.nrm, est.point - L.q);
    res_base += d * d;
  }
  est.rms_residual = std::sqrt(res_base / n);
  return est;
}

EnergyAudit energy_audit(const StepResult& step, const ModelParams& p,
                         int n_min) {
  const WorkBreakdown w = work_decomposition(step, p, n_min);
  EnergyAudit a;
  a.dKE = w.dE_kin;
  a.dPE = w.dE_pot;
  a.w_spring = w.w_spring;
  a.w_damper = w.w_damper;
  a.w_hip = w.w_hip;
  a.residual = w.residual;

  // flight-phase mechanical energy drift, both aerial segments
  double e0 = -1.0, emax = 0.0;
  bool in_flight = false;
  for (const TrajectorySample& s : step.trajectory) {
    if (s.phase != Phase::Flight) {
      in_flight = false;
      continue;
    }
    const double e = kinetic(s.state, p) + p.m * p.g * s.state.y;
    if (!in_flight) {
      e0 = e;
      in_flight = true;
    } else {
      emax = std::max(emax, std::abs(e - e0) / std::max(std::abs(e0), 1.0));
    }
  }
  a.flight_drift_rel = emax;
  return a;
}

}  // namespace tslip
