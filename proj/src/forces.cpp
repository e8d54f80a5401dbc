#include "tslip/forces.hpp"

#include <cmath>

namespace tslip {

ForceBreakdown stance_forces(const StanceGeometry& g, const ModelParams& p) {
  ForceBreakdown f;
  const double compression = p.l0 - g.l;
  f.f_sp = p.k * compression;
  f.f_dp = -p.c * g.ldot * compression;
  f.f_ax = f.f_sp + f.f_dp;

  const Vec2 u = g.r_FH / g.l;  // foot -> hip unit

  // Redirect the total GRF through the virtual point.  With the VP on the
  // leg axis the ratio vanishes and the leg acts as a plain prismatic spring.
  const double numer = cross(g.r_FV, g.r_FH);
  const double denom = dot(g.r_FV, g.r_FH);
  double ratio = 0.0;
  if (std::abs(numer) <= p.vp_tan_clamp * std::abs(denom)) {
    ratio = (denom == 0.0) ? 0.0 : numer / denom;
  } else {
    ratio = std::copysign(p.vp_tan_clamp, denom == 0.0 ? numer : numer * denom);
    f.vp_clamped = true;
  }
  f.f_t = -f.f_ax * ratio;
  f.tau_h = -g.l * f.f_t;

  f.f_total = f.f_ax * u + f.f_t * perp(u);
  return f;
}

}  // namespace tslip
