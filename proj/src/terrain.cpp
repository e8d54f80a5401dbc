#include "tslip/terrain.hpp"

#include <cmath>
#include <stdexcept>

namespace tslip {

double ground_level(const TerrainSpec& t, int step_index) {
  switch (t.kind) {
    case TerrainSpec::Kind::Level:
      return t.y0;
    case TerrainSpec::Kind::SingleStepDown:
      return step_index < t.at_step ? t.y0 : t.y0 + t.dy_step;
    case TerrainSpec::Kind::ConstantDecline:
      return t.y0 + t.dy_gnd * step_index;
  }
  throw std::logic_error("ground_level: bad terrain kind");
}

double effective_slope(const TerrainSpec& t, double mean_step_length) {
  if (!(mean_step_length > 0.0)) {
    throw std::invalid_argument("effective_slope: step length must be > 0");
  }
  const double drop =
      (t.kind == TerrainSpec::Kind::ConstantDecline) ? -t.dy_gnd : -t.dy_step;
  return std::atan2(drop, mean_step_length);
}

}  // namespace tslip
