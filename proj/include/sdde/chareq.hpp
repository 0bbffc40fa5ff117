#pragma once

// Characteristic function of the uniform-delay equation
//
//     h_a(lambda) = lambda - a * int_{-1}^0 exp(lambda u) du,
//
// its leading root, the asymptotic regime of a drift value, and the residue
// constants of the dominant term of the fundamental solution.

#include <complex>
#include <numbers>
#include <optional>
#include <string_view>

namespace sdde {

/// The drift value -pi^2/2 where the leading root pair crosses the imaginary axis.
inline constexpr double kCriticalDrift = -std::numbers::pi * std::numbers::pi / 2.0;

enum class Regime { LAN, LAQ_ZERO, LAQ_CRITICAL, LAMN, PLAMN };

std::string_view regime_name(Regime r);
std::optional<Regime> parse_regime(std::string_view name);

namespace chareq {

using cplx = std::complex<double>;

/// Below this modulus the delay transform is evaluated from its Taylor series.
inline constexpr double kSeriesRadius = 1e-4;

/// Absolute tolerance for recognising the special points 0 and -pi^2/2.
inline constexpr double kBoundaryTol = 1e-12;

/// int_{-1}^0 exp(lambda u) du = (1 - exp(-lambda)) / lambda, continuous at 0.
cplx delay_transform(cplx lambda);

/// d/dlambda of delay_transform.
cplx delay_transform_derivative(cplx lambda);

cplx eval_char(double a, cplx lambda);
cplx eval_char_derivative(double a, cplx lambda);

struct SearchBox {
  double re_min;
  double re_max;
  double im_min;
  double im_max;

  /// Re in [-max(3,|a|), max(1,sqrt|a|)], Im in [-1/2, 4 pi].
  static SearchBox default_for(double a);
};

struct LeadingRoot {
  double v0 = 0.0;
  double kappa0 = 0.0;
  bool is_real = false;
  int multiplicity = 1;
  double residual = 0.0;

  cplx lambda() const { return {v0, kappa0}; }
};

/// Winding number of h_a around the boundary of box, i.e. the number of
/// roots inside. Throws NoConvergence if the boundary passes through a root.
int count_zeros(double a, const SearchBox& box);

/// Number of roots in the open disk |lambda - center| < radius.
int count_zeros_in_disk(double a, cplx center, double radius);

/// Root of h_a with maximal real part (Im >= 0 representative).
/// Requires a != 0, tol > 0.
LeadingRoot leading_root(double a, double tol = 1e-12);
LeadingRoot leading_root(double a, double tol, const SearchBox& box);

Regime classify_regime(double a);

struct ResidueData {
  enum class Kind { RealRoot, ComplexPair };

  Kind kind = Kind::RealRoot;
  double psi_real = 0.0;  // RealRoot only
  double A0 = 0.0;        // ComplexPair only
  double B0 = 0.0;        // ComplexPair only
  double v0 = 0.0;
  double kappa0 = 0.0;

  /// psi_{0,a}(t): constant for a real root, A0 cos(kappa0 t) + B0 sin(kappa0 t) otherwise.
  double psi(double t) const;
};

/// Residue constants of the leading term of the fundamental solution.
/// Requires a > 0 or a <= -pi^2/2; throws UnsupportedRegime otherwise.
ResidueData residue_constants(double a);

/// Same constants computed from the complex residue lambda0 / h'(lambda0)
/// instead of the closed-form quotients; used to cross-check them.
ResidueData residue_constants_from_derivative(double a);

/// Leading term of the delay average y(t) = int_{-1}^0 x_{0,a}(t+u) du.
/// Averaging multiplies the complex residue by (1 - e^{-lambda0})/lambda0,
/// which equals lambda0 / a on the characteristic equation.
ResidueData averaged_residue(double a);

/// Local scaling rate r_{a,T}. Requires T > 0.
double scaling(double a, double T);

}  // namespace chareq
}  // namespace sdde
