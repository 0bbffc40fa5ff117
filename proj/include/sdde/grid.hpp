#pragma once

#include <cstddef>

namespace sdde {

/// Uniform time grid with 1/dt and T/dt both positive integers.
struct Grid {
  double dt = 0.0;
  std::size_t per_unit = 0;  // points per unit delay, 1/dt
  std::size_t steps = 0;     // T/dt
  double T = 0.0;

  double time(std::size_t k) const { return static_cast<double>(k) * dt; }
};

/// Throws InvalidGrid unless 1/dt and T/dt are positive integers (to 1e-9).
Grid make_grid(double dt, double T);

/// Number of dt-steps from 0 to t; throws InvalidGrid when t is off-grid.
std::size_t steps_to(double t, double dt);

}  // namespace sdde
