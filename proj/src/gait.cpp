#include "tslip/gait.hpp"

#include <algorithm>
#include <cmath>

namespace tslip {

ApexState apex_state_of(const StepRecord& rec) {
  return {rec.step.apex_out.y - rec.ground, rec.step.apex_out.xdot,
          rec.step.apex_out.theta, rec.step.apex_out.thetadot};
}

double apex_delta(const ApexState& a, const ApexState& ref) {
  constexpr double kFloor = 0.01;
  const double d[4] = {
      std::abs(a.h - ref.h) / std::max(std::abs(ref.h), kFloor),
      std::abs(a.xdot - ref.xdot) / std::max(std::abs(ref.xdot), kFloor),
      std::abs(a.theta - ref.theta) / std::max(std::abs(ref.theta), kFloor),
      std::abs(a.thetadot - ref.thetadot) /
          std::max(std::abs(ref.thetadot), kFloor),
  };
  return *std::max_element(d, d + 4);
}

namespace {

ConvergenceReport analyze_convergence(const std::vector<StepRecord>& steps,
                                      const GaitOptions& opt) {
  ConvergenceReport rep;
  const int n = static_cast<int>(steps.size());
  if (n < 2) return rep;

  std::vector<ApexState> ap(n);
  for (int i = 0; i < n; ++i) ap[i] = apex_state_of(steps[i]);

  rep.deltas.resize(n, 0.0);
  for (int i = 1; i < n; ++i) rep.deltas[i] = apex_delta(ap[i], ap[i - 1]);

  // trailing run of below-tolerance deltas = steady
  int first = n;
  for (int i = n - 1; i >= 1 && rep.deltas[i] < opt.convergence_tol; --i) {
    first = i;
  }
  if (first <= n - 1) {
    rep.steady = true;
    rep.first_steady_step = first - 1;  // the step whose apex_out started the run
  }

  // smallest period whose strided deltas are below tolerance over the tail
  for (int per = 1; per <= opt.period_max && per * 3 <= n; ++per) {
    bool ok = true;
    for (int i = n - 1; i >= n - per - 1 && i - per >= 0; --i) {
      if (apex_delta(ap[i], ap[i - per]) >= opt.convergence_tol) {
        ok = false;
        break;
      }
    }
    if (ok) {
      rep.period = per;
      break;
    }
  }
  return rep;
}

}  // namespace

GaitResult simulate_gait(const BodyState& apex0, const ControlsFn& controls,
                         const ModelParams& p, const TerrainSpec& terrain,
                         const GaitOptions& opt, const IntegratorSettings& set) {
  GaitResult out;
  BodyState apex = apex0;
  for (int k = 0; k < opt.n_steps; ++k) {
    const double ground = ground_level(terrain, k);
    const StepControls c = controls(k, out.steps);
    StepResult step = simulate_step(apex, c, p, ground, set);
    const StepStatus status = step.status;
    out.steps.push_back({std::move(step), ground});
    if (status != StepStatus::Ok) {
      out.status = status;
      break;
    }
    apex = out.steps.back().step.apex_out;
  }
  out.convergence = analyze_convergence(out.steps, opt);
  return out;
}

}  // namespace tslip
