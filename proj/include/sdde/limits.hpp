#pragma once

// Samplers for the limit laws of the scaled estimator error
// r_{a,T}^{-1} (a_hat_T - a) in the five regimes.
//
// Every draw i of a sampler called with seed s uses its own engine seeded
// with substream_seed(s, i), so results do not depend on `jobs`.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sdde/chareq.hpp"
#include "sdde/rng.hpp"
#include "sdde/simul.hpp"

namespace sdde::limits {

struct LimitMeta {
  double a = 0.0;
  double d = 0.0;          // PLAMN only
  std::string x0;          // initial-segment descriptor
  double grid_step = 0.0;  // Wiener grid 1/m, or tail quadrature step
  std::uint64_t seed = 0;
};

struct LimitSample {
  Regime regime = Regime::LAN;
  std::vector<double> values;
  std::size_t n = 0;
  LimitMeta meta;
};

/// n draws of N(0, 1/j_a); NonpositiveInformation unless j_a > 0.
LimitSample sample_lan_limit(double j_a, std::size_t n, std::uint64_t seed);

/// Discretised functionals of one (or two) standard Wiener paths on [0, 1]
/// with m steps: left-point Ito sums, the Levy-area sum and the trapezoid
/// integrals of W^2.
struct WienerFunctionals {
  double ito11 = 0.0;  // sum W1_j dW1_j
  double ito22 = 0.0;  // sum W2_j dW2_j
  double area = 0.0;   // sum (W1_j dW2_j - W2_j dW1_j)
  double sq1 = 0.0;    // sum trapezoid(W1^2) / m
  double sq2 = 0.0;
};

/// W_j is the left-point value sum_{i<j} dw_i; dw2 may be empty.
WienerFunctionals wiener_functionals(std::span<const double> dw1, std::span<const double> dw2);

/// int W dW / int W^2 dt; requires m >= 1000.
double df_ratio(const WienerFunctionals& f);

/// [16 pi area - 4 pi^2 (ito11 + ito22)] / [16 (sq1 + sq2)].
double critical_ratio(const WienerFunctionals& f);

LimitSample sample_df_limit(std::size_t n, std::size_t m, std::uint64_t seed, unsigned jobs = 1);
LimitSample sample_critical_limit(std::size_t n, std::size_t m, std::uint64_t seed, unsigned jobs = 1);

/// Relative weight below which the exponentially damped Wiener integrals
/// over [0, inf) are truncated.
inline constexpr double kTailCutoff = 1e-8;

/// Ingredients of the mixed-normal limit for a > 0:
/// U = X0(0) + a int int e^{-v0(s-u)} X0(s) ds du + int_0^inf e^{-v0 s} dW(s),
/// J = (1-e^{-v0})^2 / (2 v0 (v0^2+2v0-a)^2) U^2.
struct LamnProcess {
  double a = 0.0;
  double v0 = 0.0;
  double info_factor = 0.0;    // J / U^2
  double deterministic = 0.0;  // U minus its noise part
  double ds = 0.0;
  std::vector<double> weights;  // e^{-v0 s_j} sqrt(ds)

  static LamnProcess build(double a, const simul::InitialSegment& x0, std::size_t m_tail);
  double draw_u(GaussianSource& g) const;
};

/// Z / sqrt(J_a) with Z independent of J_a. UnsupportedRegime for a <= 0.
LimitSample sample_lamn_limit(double a, const simul::InitialSegment& x0, std::size_t n, std::size_t m_tail,
                              std::uint64_t seed, unsigned jobs = 1);

/// Which sinusoid drives V in the periodic limit.
enum class PlamnKernel {
  /// Leading term of the delay average y(t) = int_{-1}^0 x_{0,a}(t+u) du;
  /// the process that actually enters int Q^2 dt.
  DelayAveraged,
  /// Leading term of x_{0,a} itself, A0 cos + B0 sin.
  Fundamental,
};

/// Ingredients of the periodic mixed-normal limit for a < -pi^2/2. Because
/// the kernel phi(t) = A cos(kappa t) + B sin(kappa t) is a sinusoid,
/// V(t) = P cos(kappa t) + R sin(kappa t) with Gaussian coefficients (P, R).
struct PlamnProcess {
  double a = 0.0;
  double v0 = 0.0;
  double kappa = 0.0;
  double A = 0.0;
  double B = 0.0;
  double det_cos = 0.0;  // deterministic part of P
  double det_sin = 0.0;  // deterministic part of R
  double ds = 0.0;
  std::vector<double> wc;  // e^{-v0 s_j} cos(kappa s_j) sqrt(ds)
  std::vector<double> ws;  // e^{-v0 s_j} sin(kappa s_j) sqrt(ds)

  static PlamnProcess build(double a, const simul::InitialSegment& x0, std::size_t m_tail,
                            PlamnKernel kernel = PlamnKernel::DelayAveraged);

  double period() const;  // pi / kappa

  struct Coefficients {
    double P = 0.0;
    double R = 0.0;
  };
  Coefficients draw(GaussianSource& g) const;

  double V(const Coefficients& c, double t) const;

  /// J(d) = int_0^inf e^{-2 v0 s} V(d - s)^2 ds by trapezoid over the tail grid.
  /// No range check on d.
  double information(const Coefficients& c, double d) const;
};

/// Z / sqrt(J_a(d)); InvalidPhase unless 0 <= d < pi / kappa0(a).
LimitSample sample_plamn_limit(double a, const simul::InitialSegment& x0, double d, std::size_t n,
                               std::size_t m_tail, std::uint64_t seed, unsigned jobs = 1,
                               PlamnKernel kernel = PlamnKernel::DelayAveraged);

}  // namespace sdde::limits
