#pragma once

// Fundamental solution x_{0,a} of the deterministic delay equation
//
//     x(t) = 1 + a int_0^t int_{-1}^0 x(s+u) du ds,   x = 0 on [-1,0), x(0) = 1,
//
// its delay average y(t) = int_{-1}^0 x(t+u) du, and the Fisher limit
// J_a = int_0^inf y(t)^2 dt of the stable regime.

#include <cstddef>
#include <span>
#include <vector>

#include "sdde/grid.hpp"

namespace sdde::fundsol {

struct FundamentalSolution {
  double a = 0.0;
  double dt = 0.0;
  double t_max = 0.0;
  std::size_t per_unit = 0;
  std::vector<double> x;  // grid over [-1, t_max]; x[per_unit] is t = 0
  std::vector<double> y;  // grid over [0, t_max]
  double decay_estimate = 0.0;

  std::size_t steps() const { return y.empty() ? 0 : y.size() - 1; }

  /// x on [0, t_max].
  std::span<const double> x_nonnegative() const {
    return std::span<const double>(x).subspan(per_unit);
  }

  /// x(t) for grid t in [-1, t_max].
  double x_at(double t) const;
  double y_at(double t) const;
};

/// Method of steps on x' = a z, z' = x(t) - x(t-1), z(0) = 0 with classical
/// RK4; the history term at half steps is interpolated linearly inside the
/// grid cell, with x(0-) = 0 at the jump of the initial function.
/// Requires t_max >= 1 and dt dividing 1 and t_max (else InvalidGrid).
FundamentalSolution fundamental_solution(double a, double t_max, double dt);

/// Trapezoid rule for int_{max(0,t-1)}^t x(s) ds at every grid point of [0, t_max].
std::vector<double> delay_average(const FundamentalSolution& fs);

/// Empirical exponential rate of max|x| over unit windows of the tail.
double fit_decay_rate(const FundamentalSolution& fs);

struct FisherLimit {
  double value = 0.0;
  double t_max = 0.0;
  double dt = 0.0;
  double tail_bound = 0.0;  // estimate of int_{t_max}^inf y^2 from decay_estimate
};

/// J_a for a in (-pi^2/2, 0): t_max doubles from 20 and dt halves from 1e-2
/// until successive values agree to rel_tol. UnsupportedRegime outside LAN,
/// NoConvergence beyond t_max = 640.
FisherLimit fisher_limit_detail(double a, double rel_tol = 1e-7);
double fisher_limit(double a, double rel_tol = 1e-7);

/// psi_{0,a}(t) e^{v0(a) t}; the dominant term of x_{0,a}(t) for a > 0 or a <= -pi^2/2.
double asymptotic_form(double a, double t);

}  // namespace sdde::fundsol
