#include <doctest.h>

#include <cmath>
#include <random>

#include "tslip/dynamics.hpp"
#include "tslip/integrate.hpp"
#include "tslip/model.hpp"

using namespace tslip;

namespace {

ModelParams base_params() {
  ModelParams p;
  p.c = 0.0;
  return p;
}

DerivFn flight_fn(const ModelParams& p) {
  return [&p](double, const BodyState& s) { return flight_derivatives(s, p); };
}

DerivFn stance_fn(const ModelParams& p, const Vec2& foot, const VpConfig& vp) {
  return [&p, foot, vp](double, const BodyState& s) {
    return stance_derivatives(s, foot, p, vp).dstate;
  };
}

}  // namespace

TEST_CASE("ballistic touch-down time matches the closed form") {
  ModelParams p = base_params();
  p.r_H = 0.1;
  const double theta_td = 1.15;

  BodyState apex;
  apex.y = 1.3;
  apex.xdot = 3.0;
  apex.theta = 0.0;
  apex.thetadot = 0.0;  // keep the leg tip height a pure parabola

  const double tip0 = flight_foot(apex, p, theta_td).y;
  REQUIRE(tip0 > 0.0);
  const double t_expect = std::sqrt(2.0 * tip0 / p.g);

  std::vector<Guard> guards;
  guards.push_back({1, Crossing::Falling,
                    [&](double, const BodyState& s) {
                      return flight_foot(s, p, theta_td).y;
                    },
                    nullptr});
  IntegratorSettings set;
  const auto out =
      integrate_until_event(flight_fn(p), 0.0, apex, 5.0, guards, set, nullptr);
  REQUIRE(out.status == IntegrationStatus::Event);
  CHECK(out.event->t == doctest::Approx(t_expect).epsilon(1e-9));
  CHECK(std::abs(flight_foot(out.event->state, p, theta_td).y) < 1e-9);
}

TEST_CASE("flight conserves mechanical energy to integrator accuracy") {
  ModelParams p = base_params();
  BodyState s0;
  s0.y = 1.2;
  s0.xdot = 4.0;
  s0.ydot = 0.0;
  s0.thetadot = 1.0;
  IntegratorSettings set;
  std::vector<Sample> samples;
  const auto out = integrate_to(flight_fn(p), 0.0, s0, 0.45, set, &samples);
  REQUIRE(out.status == IntegrationStatus::TimeLimit);
  const auto energy = [&](const BodyState& s) {
    return 0.5 * p.m * (s.xdot * s.xdot + s.ydot * s.ydot) +
           0.5 * p.J * s.thetadot * s.thetadot + p.m * p.g * s.y;
  };
  const double e0 = energy(s0);
  for (const Sample& smp : samples) {
    CHECK(std::abs(energy(smp.state) - e0) / e0 < 1e-10);
  }
}

TEST_CASE("guard at zero at t=0 is masked by its arming predicate") {
  ModelParams p = base_params();
  p.r_H = 0.0;
  const Vec2 foot{0.0, 0.0};
  BodyState s0;
  s0.y = 1.0;  // l = l0 exactly: rest-length guard value is 0 at t=0
  s0.xdot = 3.5;
  s0.ydot = -0.9;

  std::vector<Guard> guards;
  guards.push_back({1, Crossing::Rising,
                    [&](double, const BodyState& s) {
                      return (hip_point(s, p) - foot).norm() - p.l0;
                    },
                    [&](double, const BodyState& s) {
                      return (hip_point(s, p) - foot).norm() - p.l0 < -1e-9;
                    }});
  IntegratorSettings set;
  const auto out = integrate_until_event(stance_fn(p, foot, {}), 0.0, s0, 3.0,
                                         guards, set, nullptr);
  // must compress first, then fire on the way back out
  REQUIRE(out.status == IntegrationStatus::Event);
  CHECK(out.event->t > 0.05);
  const double l_end = (hip_point(out.event->state, p) - foot).norm();
  CHECK(std::abs(l_end - p.l0) < 1e-9);
}

TEST_CASE("conservative SLIP stance is time-reflection symmetric") {
  // Start at the symmetric mid-stance point (vertical compressed leg, no
  // radial velocity).  The take-off state must mirror the touch-down state
  // obtained by running the x-reflected initial condition.
  ModelParams p = base_params();
  p.r_H = 0.0;
  const Vec2 foot{0.0, 0.0};

  BodyState mid;
  mid.y = 0.93;
  mid.xdot = 3.8;
  mid.ydot = 0.0;

  std::vector<Guard> guards;
  guards.push_back({1, Crossing::Rising,
                    [&](double, const BodyState& s) {
                      return (hip_point(s, p) - foot).norm() - p.l0;
                    },
                    nullptr});
  IntegratorSettings set;
  set.rel_tol = 1e-11;
  set.abs_tol = 1e-11;

  const auto fwd = integrate_until_event(stance_fn(p, foot, {}), 0.0, mid, 3.0,
                                         guards, set, nullptr);
  REQUIRE(fwd.status == IntegrationStatus::Event);

  BodyState mirrored = mid;
  mirrored.xdot = -mid.xdot;
  const auto bwd = integrate_until_event(stance_fn(p, foot, {}), 0.0, mirrored,
                                         3.0, guards, set, nullptr);
  REQUIRE(bwd.status == IntegrationStatus::Event);

  CHECK(fwd.event->t == doctest::Approx(bwd.event->t).epsilon(1e-9));
  CHECK(fwd.event->state.x == doctest::Approx(-bwd.event->state.x).epsilon(1e-8));
  CHECK(fwd.event->state.y == doctest::Approx(bwd.event->state.y).epsilon(1e-8));
  CHECK(fwd.event->state.xdot ==
        doctest::Approx(-bwd.event->state.xdot).epsilon(1e-8));
  CHECK(fwd.event->state.ydot ==
        doctest::Approx(bwd.event->state.ydot).epsilon(1e-8));
}

TEST_CASE("adaptive integration matches a fine fixed-step reference") {
  ModelParams p = base_params();
  p.c = 75.0;
  std::mt19937 rng(314159);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 3; ++i) {
    VpConfig vp;
    vp.r_vp = -0.3 + 0.5 * U(rng);
    vp.theta_vp = 0.15 * U(rng);
    vp.frame = i % 2 ? VpFrame::BodyAligned : VpFrame::WorldVertical;
    const Vec2 foot{0.0, 0.0};

    BodyState s0;
    s0.x = 0.15 + 0.1 * U(rng);
    s0.y = 0.9 + 0.05 * U(rng);
    s0.theta = 0.15 * U(rng);
    s0.xdot = 3.0 + U(rng);
    s0.ydot = -0.8 + 0.4 * U(rng);
    s0.thetadot = 0.5 * U(rng);

    IntegratorSettings set;
    set.rel_tol = 1e-10;
    set.abs_tol = 1e-10;
    const double t_end = 0.12;
    const auto adaptive =
        integrate_to(stance_fn(p, foot, vp), 0.0, s0, t_end, set, nullptr);
    const BodyState ref =
        rk4_integrate(stance_fn(p, foot, vp), 0.0, s0, t_end, 1e-6);

    const StateVec a = pack(adaptive.end_state), r = pack(ref);
    for (int c = 0; c < 6; ++c) {
      CHECK(std::abs(a[c] - r[c]) / std::max(1.0, std::abs(r[c])) < 1e-6);
    }
  }
}

TEST_CASE("non-finite dynamics are reported, not propagated") {
  const DerivFn bad = [](double t, const BodyState&) -> StateVec {
    if (t > 0.01) return {0, 0, 0, std::nan(""), 0, 0};
    return {1, 0, 0, 0, 0, 0};
  };
  BodyState s0;
  IntegratorSettings set;
  const auto out = integrate_to(bad, 0.0, s0, 1.0, set, nullptr);
  CHECK(out.status == IntegrationStatus::NonFinite);
}
