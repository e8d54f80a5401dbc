#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "tslip/terrain.hpp"

using namespace tslip;

TEST_CASE("ground level per terrain kind") {
  TerrainSpec level;
  level.y0 = 0.25;
  CHECK(ground_level(level, 0) == 0.25);
  CHECK(ground_level(level, 17) == 0.25);

  TerrainSpec drop;
  drop.kind = TerrainSpec::Kind::SingleStepDown;
  drop.dy_step = -0.2;
  drop.at_step = 5;
  CHECK(ground_level(drop, 0) == 0.0);
  CHECK(ground_level(drop, 4) == 0.0);
  CHECK(ground_level(drop, 5) == doctest::Approx(-0.2));
  CHECK(ground_level(drop, 11) == doctest::Approx(-0.2));

  TerrainSpec decline;
  decline.kind = TerrainSpec::Kind::ConstantDecline;
  decline.dy_gnd = -0.1;
  CHECK(ground_level(decline, 0) == 0.0);
  CHECK(ground_level(decline, 1) == doctest::Approx(-0.1));
  CHECK(ground_level(decline, 7) == doctest::Approx(-0.7));
}

TEST_CASE("effective slope from per-step drop and step length") {
  TerrainSpec decline;
  decline.kind = TerrainSpec::Kind::ConstantDecline;
  decline.dy_gnd = -0.10;
  const double slope = effective_slope(decline, 0.81);
  CHECK(slope == doctest::Approx(std::atan2(0.10, 0.81)).epsilon(1e-12));
  CHECK(slope * 180.0 / M_PI == doctest::Approx(7.04).epsilon(1e-3));

  TerrainSpec level;
  CHECK(effective_slope(level, 0.8) == 0.0);

  CHECK_THROWS_AS(effective_slope(decline, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(effective_slope(decline, -1.0), std::invalid_argument);
}
