#include "sdde/chareq.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "sdde/error.hpp"

namespace sdde {

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::LAN: return "LAN";
    case Regime::LAQ_ZERO: return "LAQ_ZERO";
    case Regime::LAQ_CRITICAL: return "LAQ_CRITICAL";
    case Regime::LAMN: return "LAMN";
    case Regime::PLAMN: return "PLAMN";
  }
  return "?";
}

std::optional<Regime> parse_regime(std::string_view name) {
  for (Regime r : {Regime::LAN, Regime::LAQ_ZERO, Regime::LAQ_CRITICAL, Regime::LAMN, Regime::PLAMN})
    if (regime_name(r) == name) return r;
  return std::nullopt;
}

namespace chareq {
namespace {

constexpr double kPi = std::numbers::pi;

// exp(z) - 1 without cancellation for small |z|.
cplx expm1c(cplx z) {
  const double x = z.real(), y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

using Path = std::function<cplx(double)>;

// Adaptive argument-principle count: each piece of the contour is split
// until the phase of h_a turns by at most pi/8 across it and across both
// halves consistently. A piece still unresolved after kMaxDepth splits means
// the contour runs (numerically) through a root.
std::optional<int> winding(double a, const Path& path) {
  constexpr int kInitial = 256;
  constexpr int kMaxDepth = 40;
  constexpr double kMaxTurn = kPi / 8.0;
  double total = 0.0;

  std::function<bool(double, double, cplx, cplx, int)> walk = [&](double s0, double s1, cplx h0, cplx h1,
                                                                  int depth) {
    const double sm = 0.5 * (s0 + s1);
    const cplx hm = eval_char(a, path(sm));
    if (std::abs(hm) == 0.0) return false;
    const double d = std::arg(h1 / h0);
    const double d0 = std::arg(hm / h0), d1 = std::arg(h1 / hm);
    if (std::abs(d) <= kMaxTurn && std::abs(d0) <= kMaxTurn && std::abs(d1) <= kMaxTurn &&
        std::abs(d0 + d1 - d) < 1e-9) {
      total += d;
      return true;
    }
    if (depth >= kMaxDepth) return false;
    return walk(s0, sm, h0, hm, depth + 1) && walk(sm, s1, hm, h1, depth + 1);
  };

  cplx prev = eval_char(a, path(0.0));
  if (std::abs(prev) == 0.0) return std::nullopt;
  for (int i = 1; i <= kInitial; ++i) {
    const double s0 = static_cast<double>(i - 1) / kInitial, s1 = static_cast<double>(i) / kInitial;
    const cplx cur = eval_char(a, path(s1));
    if (std::abs(cur) == 0.0 || !walk(s0, s1, prev, cur, 0)) return std::nullopt;
    prev = cur;
  }
  const double turns = total / (2.0 * kPi);
  const long rounded = std::lround(turns);
  if (std::abs(turns - static_cast<double>(rounded)) >= 0.25) return std::nullopt;
  return static_cast<int>(rounded);
}

Path rectangle_path(const SearchBox& b) {
  return [b](double s) -> cplx {
    const double q = 4.0 * s;
    if (q < 1.0) return {b.re_min + q * (b.re_max - b.re_min), b.im_min};
    if (q < 2.0) return {b.re_max, b.im_min + (q - 1.0) * (b.im_max - b.im_min)};
    if (q < 3.0) return {b.re_max - (q - 2.0) * (b.re_max - b.re_min), b.im_max};
    return {b.re_min, b.im_max - std::min(q - 3.0, 1.0) * (b.im_max - b.im_min)};
  };
}

std::optional<int> try_count(double a, const SearchBox& box) {
  return winding(a, rectangle_path(box));
}

// Complex Newton on h_a; identical to 2-D Newton on (Re h, Im h) because h
// is holomorphic (the Jacobian is the Cauchy-Riemann matrix of h').
std::optional<cplx> newton(double a, cplx z, int max_iter = 100) {
  for (int it = 0; it < max_iter; ++it) {
    const cplx f = eval_char(a, z);
    const cplx df = eval_char_derivative(a, z);
    if (std::abs(df) == 0.0 || !std::isfinite(std::abs(df))) return std::nullopt;
    const cplx step = f / df;
    z -= step;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(z))) {
      // one extra step settles the last bit
      z -= eval_char(a, z) / eval_char_derivative(a, z);
      return z;
    }
  }
  return std::nullopt;
}

bool inside(const SearchBox& b, cplx z, double slack) {
  return z.real() >= b.re_min - slack && z.real() <= b.re_max + slack && z.imag() >= b.im_min - slack &&
         z.imag() <= b.im_max + slack;
}

// Recursive bisection of the box, counting roots on each piece, until every
// piece holds one root that Newton converges to from the piece's centre.
void isolate(double a, const SearchBox& box, int count, int depth, std::vector<cplx>& out) {
  if (count <= 0) return;
  const double w = box.re_max - box.re_min;
  const double h = box.im_max - box.im_min;
  if (count == 1) {
    const cplx centre{0.5 * (box.re_min + box.re_max), 0.5 * (box.im_min + box.im_max)};
    if (auto z = newton(a, centre); z && inside(box, *z, 1e-9 * (1.0 + std::abs(*z)))) {
      out.push_back(*z);
      return;
    }
  }
  if (depth > 60 || std::max(w, h) < 1e-9) {
    throw NoConvergence("leading_root: could not isolate roots of h_a for a = " + std::to_string(a));
  }
  static constexpr std::array<double, 7> kCuts{0.5, 0.4567, 0.5433, 0.3891, 0.6109, 0.3217, 0.6783};
  for (double f : kCuts) {
    SearchBox lo = box, hi = box;
    if (w >= h) {
      lo.re_max = hi.re_min = box.re_min + f * w;
    } else {
      lo.im_max = hi.im_min = box.im_min + f * h;
    }
    const auto c_lo = try_count(a, lo);
    if (!c_lo) continue;
    const auto c_hi = try_count(a, hi);
    if (!c_hi) continue;
    // search the right-hand piece first; leading roots live there
    isolate(a, hi, *c_hi, depth + 1, out);
    isolate(a, lo, *c_lo, depth + 1, out);
    return;
  }
  throw NoConvergence("leading_root: every cut of the search box passes through a root");
}

LeadingRoot finish(double a, cplx z, double tol) {
  LeadingRoot r;
  r.is_real = std::abs(z.imag()) <= 1e-10 * std::max(1.0, std::abs(z));
  if (r.is_real) {
    if (auto zr = newton(a, cplx{z.real(), 0.0})) z = cplx{zr->real(), 0.0};
  }
  r.v0 = z.real();
  r.kappa0 = r.is_real ? 0.0 : std::abs(z.imag());
  r.multiplicity = 1;
  r.residual = std::abs(eval_char(a, {r.v0, r.kappa0}));
  if (!(r.residual <= tol)) {
    throw NoConvergence("leading_root: residual " + std::to_string(r.residual) + " exceeds tolerance");
  }
  return r;
}

LeadingRoot positive_drift_root(double a, double tol) {
  // h_a is real on the real axis, h(0) = -a < 0 and h(sqrt a) = sqrt(a) e^{-sqrt a} > 0.
  auto h = [a](double x) { return eval_char(a, {x, 0.0}).real(); };
  double lo = 0.0, hi = std::sqrt(a);
  for (int it = 0; it < 200 && hi - lo > 1e-10 * std::sqrt(a); ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  auto z = newton(a, cplx{0.5 * (lo + hi), 0.0});
  if (!z || z->real() <= 0.0 || z->real() >= std::sqrt(a)) {
    throw NoConvergence("leading_root: Newton left the bracket (0, sqrt a)");
  }
  return finish(a, cplx{z->real(), 0.0}, tol);
}

}  // namespace

cplx delay_transform(cplx lambda) {
  if (std::abs(lambda) < kSeriesRadius) {
    // sum_n (-lambda)^n / (n+1)!
    cplx term{1.0, 0.0}, s{0.0, 0.0};
    for (int n = 0; n < 6; ++n) {
      s += term;
      term *= -lambda / static_cast<double>(n + 2);
    }
    return s;
  }
  return -expm1c(-lambda) / lambda;
}

cplx delay_transform_derivative(cplx lambda) {
  if (std::abs(lambda) < kSeriesRadius) {
    // sum_n (-1)^{n+1} (n+1) lambda^n / (n+2)!
    cplx s{0.0, 0.0}, pw{1.0, 0.0};
    double fact = 2.0;
    for (int n = 0; n < 5; ++n) {
      const double sign = (n % 2 == 0) ? -1.0 : 1.0;
      s += sign * static_cast<double>(n + 1) * pw / fact;
      pw *= lambda;
      fact *= static_cast<double>(n + 3);
    }
    return s;
  }
  // (e^{-l}(1 + l) - 1) / l^2 = (expm1(-l) + l e^{-l}) / l^2
  return (expm1c(-lambda) + lambda * std::exp(-lambda)) / (lambda * lambda);
}

cplx eval_char(double a, cplx lambda) { return lambda - a * delay_transform(lambda); }

cplx eval_char_derivative(double a, cplx lambda) { return 1.0 - a * delay_transform_derivative(lambda); }

SearchBox SearchBox::default_for(double a) {
  const double r = std::abs(a);
  return {-std::max(3.0, r), std::max(1.0, std::sqrt(r)), -0.5, 4.0 * kPi};
}

int count_zeros(double a, const SearchBox& box) {
  if (auto c = try_count(a, box)) return *c;
  throw NoConvergence("count_zeros: contour passes through a root of h_a");
}

int count_zeros_in_disk(double a, cplx center, double radius) {
  auto c = winding(a, [=](double s) { return center + radius * std::polar(1.0, 2.0 * kPi * s); });
  if (!c) throw NoConvergence("count_zeros_in_disk: circle passes through a root of h_a");
  return *c;
}

LeadingRoot leading_root(double a, double tol) { return leading_root(a, tol, SearchBox::default_for(a)); }

LeadingRoot leading_root(double a, double tol, const SearchBox& box) {
  if (a == 0.0) throw UnsupportedRegime("leading_root: a = 0 has the trivial fundamental solution");
  if (!(tol > 0.0)) throw DomainError("leading_root: tol must be positive");
  if (a > 0.0) return positive_drift_root(a, tol);

  const int total = count_zeros(a, box);
  std::vector<cplx> roots;
  isolate(a, box, total, 0, roots);
  std::vector<cplx> upper;
  for (cplx z : roots)
    if (z.imag() >= -1e-10) upper.push_back(z);
  if (upper.empty()) {
    throw NoConvergence("leading_root: no root in the search box; widen it");
  }
  const cplx lead = *std::max_element(upper.begin(), upper.end(), [](cplx p, cplx q) {
    return p.real() < q.real() || (p.real() == q.real() && p.imag() > q.imag());
  });

  // Validate: exactly one root in a small disk around the winner.
  double radius = 0.1;
  for (cplx z : roots) {
    for (cplx w : {z, std::conj(z)}) {
      const double d = std::abs(w - lead);
      if (d > 1e-8) radius = std::min(radius, 0.5 * d);
    }
  }
  if (count_zeros_in_disk(a, lead, radius) != 1) {
    throw NoConvergence("leading_root: disk check did not find a simple root");
  }
  return finish(a, lead, tol);
}

Regime classify_regime(double a) {
  if (std::abs(a) <= kBoundaryTol) return Regime::LAQ_ZERO;
  if (std::abs(a - kCriticalDrift) <= kBoundaryTol) return Regime::LAQ_CRITICAL;
  if (a > 0.0) return Regime::LAMN;
  if (a > kCriticalDrift) return Regime::LAN;
  return Regime::PLAMN;
}

double ResidueData::psi(double t) const {
  if (kind == Kind::RealRoot) return psi_real;
  return A0 * std::cos(kappa0 * t) + B0 * std::sin(kappa0 * t);
}

namespace {

void require_residue_regime(double a, const char* who) {
  const Regime r = classify_regime(a);
  if (r == Regime::LAN || r == Regime::LAQ_ZERO) {
    throw UnsupportedRegime(std::string(who) + ": needs a > 0 or a <= -pi^2/2, got a = " + std::to_string(a));
  }
}

}  // namespace

ResidueData residue_constants(double a) {
  require_residue_regime(a, "residue_constants");
  const LeadingRoot root = leading_root(a);
  ResidueData out;
  out.v0 = root.v0;
  out.kappa0 = root.kappa0;
  const double v = root.v0, k = root.kappa0;
  if (a > 0.0) {
    out.kind = ResidueData::Kind::RealRoot;
    out.psi_real = v / (v * v + 2.0 * v - a);
    return out;
  }
  out.kind = ResidueData::Kind::ComplexPair;
  const double p = v * v - k * k + 2.0 * v - a;
  const double den = p * p + 4.0 * k * k * (v + 1.0) * (v + 1.0);
  out.A0 = 2.0 * ((v * v + k * k) * (v + 2.0) - a * v) / den;
  out.B0 = 2.0 * (v * v + k * k + a) * k / den;
  return out;
}

ResidueData residue_constants_from_derivative(double a) {
  require_residue_regime(a, "residue_constants_from_derivative");
  const LeadingRoot root = leading_root(a);
  const cplx lam = root.lambda();
  const cplx c = 1.0 / eval_char_derivative(a, lam);
  ResidueData out;
  out.v0 = root.v0;
  out.kappa0 = root.kappa0;
  if (a > 0.0) {
    out.kind = ResidueData::Kind::RealRoot;
    out.psi_real = c.real();
  } else {
    out.kind = ResidueData::Kind::ComplexPair;
    out.A0 = 2.0 * c.real();
    out.B0 = -2.0 * c.imag();
  }
  return out;
}

ResidueData averaged_residue(double a) {
  ResidueData r = residue_constants(a);
  const cplx factor = delay_transform(r.kind == ResidueData::Kind::RealRoot ? cplx{r.v0, 0.0} : cplx{r.v0, r.kappa0});
  if (r.kind == ResidueData::Kind::RealRoot) {
    r.psi_real *= factor.real();
  } else {
    // x ~ Re[(A0 - i B0) e^{lambda0 t}]; averaging multiplies the coefficient.
    const cplx coef = cplx{r.A0, -r.B0} * factor;
    r.A0 = coef.real();
    r.B0 = -coef.imag();
  }
  return r;
}

double scaling(double a, double T) {
  if (!(T > 0.0)) throw DomainError("scaling: T must be positive");
  switch (classify_regime(a)) {
    case Regime::LAN: return 1.0 / std::sqrt(T);
    case Regime::LAQ_ZERO:
    case Regime::LAQ_CRITICAL: return 1.0 / T;
    case Regime::LAMN:
    case Regime::PLAMN: return std::exp(-leading_root(a).v0 * T);
  }
  return 1.0;
}

}  // namespace chareq
}  // namespace sdde
