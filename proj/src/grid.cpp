#include "sdde/grid.hpp"

#include <cmath>
#include <string>

#include "sdde/error.hpp"

namespace sdde {
namespace {

bool near_integer(double v, double& rounded) {
  rounded = std::round(v);
  return rounded >= 1.0 && std::abs(v - rounded) <= 1e-9 * rounded;
}

}  // namespace

Grid make_grid(double dt, double T) {
  double per_unit = 0.0, steps = 0.0;
  if (!(dt > 0.0) || !near_integer(1.0 / dt, per_unit)) {
    throw InvalidGrid("dt = " + std::to_string(dt) + " does not divide the unit delay");
  }
  if (!(T > 0.0) || !near_integer(T / dt, steps)) {
    throw InvalidGrid("dt = " + std::to_string(dt) + " does not divide T = " + std::to_string(T));
  }
  Grid g;
  g.per_unit = static_cast<std::size_t>(per_unit);
  g.dt = 1.0 / per_unit;
  g.steps = static_cast<std::size_t>(steps);
  g.T = static_cast<double>(g.steps) * g.dt;
  return g;
}

std::size_t steps_to(double t, double dt) {
  const double v = t / dt;
  const double r = std::round(v);
  if (r < 0.0 || std::abs(v - r) > 1e-9 * std::max(1.0, r)) {
    throw InvalidGrid("t = " + std::to_string(t) + " is not a grid point for dt = " + std::to_string(dt));
  }
  return static_cast<std::size_t>(r);
}

}  // namespace sdde
