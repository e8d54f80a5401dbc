#include "tslip/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace tslip {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// 5th-order solution weights equal kA[6]; embedded error weights b5 - b4:
constexpr double kE[7] = {71.0 / 57600,  0.0,          -71.0 / 16695,
                          71.0 / 1920,   -17253.0 / 339200,
                          22.0 / 525,    -1.0 / 40};

StateVec axpy(const StateVec& y, double h, const StateVec (&k)[7],
              const double* a, int n) {
  StateVec r = y;
  for (int i = 0; i < 6; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += a[j] * k[j][i];
    r[i] += h * acc;
  }
  return r;
}

bool finite(const StateVec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

struct DpStep {
  StateVec y1;       // 5th-order solution at t + h
  StateVec k[7];     // stage derivatives (k[6] = f(t + h, y1), FSAL)
  double err = 0.0;  // scaled error norm
};

DpStep dp_step(const DerivFn& f, double t, const StateVec& y, double h,
               const StateVec& k1, const IntegratorSettings& set) {
  DpStep s;
  s.k[0] = k1;
  for (int stage = 1; stage < 6; ++stage) {
    const StateVec ys = axpy(y, h, s.k, kA[stage], stage);
    s.k[stage] = f(t + kC[stage] * h, unpack(ys));
  }
  s.y1 = axpy(y, h, s.k, kA[6], 6);
  s.k[6] = f(t + h, unpack(s.y1));

  double sum = 0.0;
  for (int i = 0; i < 6; ++i) {
    double e = 0.0;
    for (int j = 0; j < 7; ++j) e += kE[j] * s.k[j][i];
    e *= h;
    const double sc =
        set.abs_tol + set.rel_tol * std::max(std::abs(y[i]), std::abs(s.y1[i]));
    sum += (e / sc) * (e / sc);
  }
  s.err = std::sqrt(sum / 6.0);
  return s;
}

// Cubic Hermite interpolation inside an accepted step (used only for event
// bracketing; located events are re-integrated, not interpolated).
StateVec hermite(const StateVec& y0, const StateVec& f0, const StateVec& y1,
                 const StateVec& f1, double h, double u) {
  const double u2 = u * u, u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
  const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
  StateVec r;
  for (int i = 0; i < 6; ++i)
    r[i] = h00 * y0[i] + h * h10 * f0[i] + h01 * y1[i] + h * h11 * f1[i];
  return r;
}

struct ActiveGuard {
  const Guard* g = nullptr;
  bool armed = false;
  double prev = 0.0;  // guard value at the previous scan point
};

bool pre_side(Crossing dir, double v) {
  return dir == Crossing::Falling ? v > 0.0 : v < 0.0;
}

bool crossed(const ActiveGuard& ag, double cur) {
  return pre_side(ag.g->dir, ag.prev) && !pre_side(ag.g->dir, cur) &&
         (ag.prev != cur);
}

}  // namespace

IntegrationOutcome integrate_until_event(const DerivFn& f, double t0,
                                         const BodyState& s0, double t_max,
                                         const std::vector<Guard>& guards,
                                         const IntegratorSettings& set,
                                         std::vector<Sample>* samples) {
  IntegrationOutcome out;
  double t = t0;
  StateVec y = pack(s0);
  StateVec k1 = f(t, s0);
  if (!finite(y) || !finite(k1)) {
    out.status = IntegrationStatus::NonFinite;
    out.t_end = t;
    out.end_state = s0;
    return out;
  }

  std::vector<ActiveGuard> ags;
  ags.reserve(guards.size());
  for (const Guard& g : guards) {
    ActiveGuard ag;
    ag.g = &g;
    ag.armed = !g.arm || g.arm(t0, s0);
    ag.prev = ag.armed ? g.value(t0, s0) : 0.0;
    ags.push_back(ag);
  }

  if (samples) samples->push_back({t, s0});

  // Evaluate the state at time tm in (t, t+h] by a single Dormand-Prince
  // sub-step from the accepted step start; cheap and as accurate as the
  // integration itself for the short spans involved.
  const auto state_at = [&](double tm) -> BodyState {
    if (tm <= t) return unpack(y);
    return unpack(dp_step(f, t, y, tm - t, k1, set).y1);
  };

  // Refine one bracketed crossing with alternating secant/bisection; both
  // bracket ends converge, so termination on bracket width is sound.
  const auto refine = [&](const ActiveGuard& ag, double ta, double ga,
                          double tb, double gb, const BodyState& sb_in)
      -> EventHit {
    BodyState sb = sb_in;
    for (int it = 0; it < 100 && (tb - ta) > set.event_tol; ++it) {
      double tm = 0.5 * (ta + tb);
      if (it % 2 == 0 && std::abs(gb - ga) > 0.0) {
        const double ts = tb - gb * (tb - ta) / (gb - ga);
        if (ts > ta && ts < tb) tm = ts;
      }
      if (!(tm > ta && tm < tb)) break;  // bracket at floating-point limit
      const BodyState sm = state_at(tm);
      const double gm = ag.g->value(tm, sm);
      if (pre_side(ag.g->dir, gm)) {
        ta = tm;
        ga = gm;
      } else {
        tb = tm;
        gb = gm;
        sb = sm;
      }
    }
    return EventHit{ag.g->id, tb, sb};
  };

  double h = std::min(set.max_step, std::max(1e-6, (t_max - t0) * 1e-4));
  constexpr int kScan = 4;  // interior scan points per accepted step

  while (t < t_max) {
    h = std::min({h, set.max_step, t_max - t});
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      out.status = IntegrationStatus::StepUnderflow;
      out.t_end = t;
      out.end_state = unpack(y);
      return out;
    }

    const DpStep st = dp_step(f, t, y, h, k1, set);
    if (!finite(st.y1)) {
      h *= 0.25;
      if (h < 1e-14) {
        out.status = IntegrationStatus::NonFinite;
        out.t_end = t;
        out.end_state = unpack(y);
        return out;
      }
      continue;
    }
    if (st.err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(st.err, -0.2));
      continue;
    }

    // Accepted: scan guards across the step at interpolated interior points.
    double t_prev_scan = t;
    for (int sp = 1; sp <= kScan + 1; ++sp) {
      const double u = static_cast<double>(sp) / (kScan + 1);
      const double ts = t + u * h;
      const BodyState bs =
          (sp == kScan + 1)
              ? unpack(st.y1)
              : unpack(hermite(y, st.k[0], st.y1, st.k[6], h, u));

      std::optional<EventHit> first;
      for (ActiveGuard& ag : ags) {
        if (!ag.armed) continue;
        const double cur = ag.g->value(ts, bs);
        if (crossed(ag, cur)) {
          const EventHit hit = refine(ag, t_prev_scan, ag.prev, ts, cur, bs);
          if (!first || hit.t < first->t) first = hit;
        }
        ag.prev = cur;
      }
      if (first) {
        out.status = IntegrationStatus::Event;
        out.event = first;
        out.t_end = first->t;
        out.end_state = first->state;
        if (samples) samples->push_back({first->t, first->state});
        return out;
      }
      // Arm latches after crossing checks so a guard never fires within the
      // scan interval in which it armed.
      for (ActiveGuard& ag : ags) {
        if (!ag.armed && ag.g->arm && ag.g->arm(ts, bs)) {
          ag.armed = true;
          ag.prev = ag.g->value(ts, bs);
        }
      }
      t_prev_scan = ts;
    }

    t += h;
    y = st.y1;
    k1 = st.k[6];  // FSAL
    if (samples) samples->push_back({t, unpack(y)});
    h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(st.err, 1e-10), -0.2)));
  }

  out.status = IntegrationStatus::TimeLimit;
  out.t_end = t;
  out.end_state = unpack(y);
  return out;
}

IntegrationOutcome integrate_to(const DerivFn& f, double t0,
                                const BodyState& s0, double t_end,
                                const IntegratorSettings& set,
                                std::vector<Sample>* samples) {
  return integrate_until_event(f, t0, s0, t_end, {}, set, samples);
}

BodyState rk4_integrate(const DerivFn& f, double t0, const BodyState& s0,
                        double t_end, double h) {
  StateVec y = pack(s0);
  double t = t0;
  while (t < t_end - 1e-15) {
    const double hs = std::min(h, t_end - t);
    const StateVec k1 = f(t, unpack(y));
    StateVec y2;
    for (int i = 0; i < 6; ++i) y2[i] = y[i] + 0.5 * hs * k1[i];
    const StateVec k2 = f(t + 0.5 * hs, unpack(y2));
    for (int i = 0; i < 6; ++i) y2[i] = y[i] + 0.5 * hs * k2[i];
    const StateVec k3 = f(t + 0.5 * hs, unpack(y2));
    for (int i = 0; i < 6; ++i) y2[i] = y[i] + hs * k3[i];
    const StateVec k4 = f(t + hs, unpack(y2));
    for (int i = 0; i < 6; ++i)
      y[i] += hs / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    t += hs;
  }
  return unpack(y);
}

}  // namespace tslip
