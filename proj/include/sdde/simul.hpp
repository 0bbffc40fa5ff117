#pragma once

// Euler-Maruyama paths of
//
//     dX(t) = a int_{-1}^0 X(t+u) du dt + dW(t),   X = X0 on [-1, 0],
//
// plus the convolution processes used to check the limit arguments.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sdde::simul {

class InitialSegment {
 public:
  enum class Kind { Constant, Sampled };

  static InitialSegment constant(double c);
  /// Samples on the uniform grid over [-1, 0], both ends included.
  static InitialSegment sampled(std::vector<double> values);

  Kind kind() const { return kind_; }
  double value() const { return value_; }
  const std::vector<double>& samples() const { return samples_; }

  /// X0 on the grid with per_unit + 1 points; InvalidGrid if a sampled
  /// segment has a different resolution.
  std::vector<double> on_grid(std::size_t per_unit) const;
  double at_zero() const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::Constant;
  double value_ = 0.0;
  std::vector<double> samples_;
};

struct DelayModel {
  double a = 0.0;
  InitialSegment x0 = InitialSegment::constant(0.0);
};

enum class Noise { Gaussian, Zero };

struct SamplePath {
  DelayModel model;
  double dt = 0.0;
  double T = 0.0;
  std::size_t per_unit = 0;  // 1/dt
  std::size_t steps = 0;     // T/dt
  std::vector<double> x;     // grid over [-1, T]; x[per_unit] is t = 0
  std::vector<double> dw;    // increments over [t_k, t_{k+1}], k < steps; empty if unknown
  std::uint64_t seed = 0;
  Noise noise = Noise::Gaussian;

  bool has_increments() const { return dw.size() == steps; }
  double time_of(std::size_t i) const;  // time of x[i]
};

/// Trapezoid rule for int_{t_k-1}^{t_k} X over the m+1 grid values
/// x[k], ..., x[k+m], where x is indexed from t = -1. The single definition
/// of the delay integral used by simulation and inference alike.
double window_trapezoid(std::span<const double> x, std::size_t k, std::size_t m, double dt);

/// x_{k+1} = x_k + a Q_k dt + dw_k with dw_k ~ N(0, dt) drawn from
/// GaussianSource(seed); dw_k = 0 in Noise::Zero mode.
/// Requires T >= 1 and dt dividing 1 and T (else InvalidGrid).
SamplePath simulate_path(const DelayModel& model, double T, double dt, std::uint64_t seed,
                         Noise noise = Noise::Gaussian);

/// Z(t) = int_{-1}^0 int_u^0 y(t+u-s) X0(s) ds du by nested trapezoid, for
/// every t in times (t >= 1, on the kernel grid). kernel holds y on [0, t_max].
std::vector<double> initial_term(std::span<const double> kernel, double dt, const InitialSegment& x0,
                                 std::span<const double> times);

/// Y(t) = y(t) X0(0) + a Z(t) + sum_{j<n} y(t - s_j) dw_j, t = n dt >= 1.
/// Empty dw means no noise. KernelTooShort when y does not reach t.
std::vector<double> y_process(std::span<const double> kernel, double dt, const DelayModel& model,
                              std::span<const double> dw, std::span<const double> times);

}  // namespace sdde::simul
