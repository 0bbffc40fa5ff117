#include "sdde/limits.hpp"

#include <cmath>
#include <numbers>
#include <string_view>

#include "sdde/error.hpp"
#include "sdde/kernels.hpp"
#include "sdde/parallel.hpp"

namespace sdde::limits {

namespace {

constexpr std::size_t kMinWienerSteps = 1000;
constexpr std::size_t kDefaultSegmentSteps = 1000;

std::size_t segment_steps(const simul::InitialSegment& x0) {
  if (x0.kind() == simul::InitialSegment::Kind::Sampled) return x0.samples().size() - 1;
  return kDefaultSegmentSteps;
}

// int_{-1}^0 int_u^0 g(s - u) X0(s) ds du, with g given on [0, 1].
template <class G>
double segment_integral(const simul::InitialSegment& x0, G g) {
  const std::size_t m = segment_steps(x0);
  const double h = 1.0 / static_cast<double>(m);
  // initial_term evaluates y(1 + u - s); y(tau) = g(1 - tau)
  std::vector<double> kernel(m + 1);
  for (std::size_t i = 0; i <= m; ++i) kernel[i] = g(1.0 - static_cast<double>(i) * h);
  const double t = 1.0;
  return simul::initial_term(kernel, h, x0, std::span<const double>(&t, 1)).front();
}

// Integration horizon where e^{-v0 s} drops below kTailCutoff.
double tail_horizon(double v0) { return -std::log(kTailCutoff) / v0; }

void require_draws(std::size_t n, std::string_view who) {
  if (n == 0) throw EmptySample(std::string(who) + ": n must be positive");
}

void require_wiener_steps(std::size_t m) {
  if (m < kMinWienerSteps)
    throw InvalidGrid("Wiener grid needs at least " + std::to_string(kMinWienerSteps) + " steps, got " +
                      std::to_string(m));
}

template <class Ratio>
LimitSample sample_wiener(Regime regime, bool two_paths, std::size_t n, std::size_t m, std::uint64_t seed,
                          unsigned jobs, Ratio ratio) {
  require_draws(n, regime_name(regime));
  require_wiener_steps(m);
  LimitSample out;
  out.regime = regime;
  out.n = n;
  out.meta.grid_step = 1.0 / static_cast<double>(m);
  out.meta.seed = seed;
  out.values.resize(n);
  const double sd = std::sqrt(out.meta.grid_step);
  parallel_for(n, jobs, [&](std::size_t i) {
    GaussianSource g(substream_seed(seed, i));
    std::vector<double> dw1(m), dw2(two_paths ? m : 0);
    g.fill(dw1, sd);
    g.fill(dw2, sd);
    out.values[i] = ratio(wiener_functionals(dw1, dw2));
  });
  return out;
}

}  // namespace

LimitSample sample_lan_limit(double j_a, std::size_t n, std::uint64_t seed) {
  if (!(j_a > 0.0) || !std::isfinite(j_a))
    throw NonpositiveInformation("LAN limit needs positive finite information, got " + std::to_string(j_a));
  require_draws(n, "LAN");
  LimitSample out;
  out.regime = Regime::LAN;
  out.n = n;
  out.meta.seed = seed;
  out.values.resize(n);
  const double sd = 1.0 / std::sqrt(j_a);
  for (std::size_t i = 0; i < n; ++i) {
    GaussianSource g(substream_seed(seed, i));
    out.values[i] = sd * g();
  }
  return out;
}

WienerFunctionals wiener_functionals(std::span<const double> dw1, std::span<const double> dw2) {
  const std::size_t m = dw1.size();
  if (m == 0) throw EmptySample("wiener_functionals: no increments");
  if (!dw2.empty() && dw2.size() != m) throw DomainError("wiener_functionals: paths differ in length");

  auto cumulative = [m](std::span<const double> dw) {
    std::vector<double> w(m + 1);
    w[0] = 0.0;
    for (std::size_t j = 0; j < m; ++j) w[j + 1] = w[j] + dw[j];
    return w;
  };
  auto square_integral = [m](const std::vector<double>& w) {
    const double ends = 0.5 * (w.front() * w.front() + w.back() * w.back());
    return (kernels::sum_squares(w) - ends) / static_cast<double>(m);
  };

  WienerFunctionals f;
  const std::vector<double> w1 = cumulative(dw1);
  const std::span<const double> left1(w1.data(), m);
  f.ito11 = kernels::dot(left1, dw1);
  f.sq1 = square_integral(w1);
  if (!dw2.empty()) {
    const std::vector<double> w2 = cumulative(dw2);
    const std::span<const double> left2(w2.data(), m);
    f.ito22 = kernels::dot(left2, dw2);
    f.sq2 = square_integral(w2);
    f.area = kernels::dot(left1, dw2) - kernels::dot(left2, dw1);
  }
  return f;
}

double df_ratio(const WienerFunctionals& f) { return f.ito11 / f.sq1; }

double critical_ratio(const WienerFunctionals& f) {
  constexpr double pi = std::numbers::pi;
  return (16.0 * pi * f.area - 4.0 * pi * pi * (f.ito11 + f.ito22)) / (16.0 * (f.sq1 + f.sq2));
}

LimitSample sample_df_limit(std::size_t n, std::size_t m, std::uint64_t seed, unsigned jobs) {
  LimitSample out = sample_wiener(Regime::LAQ_ZERO, false, n, m, seed, jobs, df_ratio);
  return out;
}

LimitSample sample_critical_limit(std::size_t n, std::size_t m, std::uint64_t seed, unsigned jobs) {
  LimitSample out = sample_wiener(Regime::LAQ_CRITICAL, true, n, m, seed, jobs, critical_ratio);
  out.meta.a = kCriticalDrift;
  return out;
}

LamnProcess LamnProcess::build(double a, const simul::InitialSegment& x0, std::size_t m_tail) {
  if (chareq::classify_regime(a) != Regime::LAMN)
    throw UnsupportedRegime("LAMN limit needs a > 0, got a = " + std::to_string(a));
  if (m_tail == 0) throw InvalidGrid("LAMN limit: m_tail must be positive");
  LamnProcess p;
  p.a = a;
  p.v0 = chareq::leading_root(a).v0;
  const double v0 = p.v0;
  const double q = v0 * v0 + 2.0 * v0 - a;
  const double num = -std::expm1(-v0);
  p.info_factor = num * num / (2.0 * v0 * q * q);
  p.deterministic = x0.at_zero() + a * segment_integral(x0, [v0](double s) { return std::exp(-v0 * s); });
  p.ds = tail_horizon(v0) / static_cast<double>(m_tail);
  p.weights.resize(m_tail);
  const double sd = std::sqrt(p.ds);
  for (std::size_t j = 0; j < m_tail; ++j) p.weights[j] = sd * std::exp(-v0 * static_cast<double>(j) * p.ds);
  return p;
}

double LamnProcess::draw_u(GaussianSource& g) const {
  std::vector<double> z(weights.size());
  g.fill(z, 1.0);
  return deterministic + kernels::dot(weights, z);
}

LimitSample sample_lamn_limit(double a, const simul::InitialSegment& x0, std::size_t n, std::size_t m_tail,
                              std::uint64_t seed, unsigned jobs) {
  require_draws(n, "LAMN");
  const LamnProcess p = LamnProcess::build(a, x0, m_tail);
  LimitSample out;
  out.regime = Regime::LAMN;
  out.n = n;
  out.meta.a = a;
  out.meta.x0 = x0.describe();
  out.meta.grid_step = p.ds;
  out.meta.seed = seed;
  out.values.resize(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    GaussianSource g(substream_seed(seed, i));
    const double u = p.draw_u(g);
    const double j = p.info_factor * u * u;
    if (!(j > 0.0)) throw NonpositiveInformation("LAMN limit: J_a vanished in draw " + std::to_string(i));
    out.values[i] = g() / std::sqrt(j);
  });
  return out;
}

PlamnProcess PlamnProcess::build(double a, const simul::InitialSegment& x0, std::size_t m_tail,
                                 PlamnKernel kernel) {
  if (chareq::classify_regime(a) != Regime::PLAMN)
    throw UnsupportedRegime("PLAMN limit needs a < -pi^2/2, got a = " + std::to_string(a));
  if (m_tail == 0) throw InvalidGrid("PLAMN limit: m_tail must be positive");
  const chareq::ResidueData r =
      kernel == PlamnKernel::DelayAveraged ? chareq::averaged_residue(a) : chareq::residue_constants(a);
  PlamnProcess p;
  p.a = a;
  p.v0 = r.v0;
  p.kappa = r.kappa0;
  p.A = r.A0;
  p.B = r.B0;
  const double v0 = p.v0, k = p.kappa, A = p.A, B = p.B;

  // phi(t - s) = cos(kt) (A cos ks - B sin ks) + sin(kt) (A sin ks + B cos ks)
  const double x00 = x0.at_zero();
  p.det_cos = x00 * A + a * segment_integral(x0, [=](double s) {
                return std::exp(-v0 * s) * (A * std::cos(k * s) - B * std::sin(k * s));
              });
  p.det_sin = x00 * B + a * segment_integral(x0, [=](double s) {
                return std::exp(-v0 * s) * (A * std::sin(k * s) + B * std::cos(k * s));
              });

  p.ds = tail_horizon(v0) / static_cast<double>(m_tail);
  p.wc.resize(m_tail);
  p.ws.resize(m_tail);
  const double sd = std::sqrt(p.ds);
  for (std::size_t j = 0; j < m_tail; ++j) {
    const double s = static_cast<double>(j) * p.ds;
    const double e = sd * std::exp(-v0 * s);
    p.wc[j] = e * std::cos(k * s);
    p.ws[j] = e * std::sin(k * s);
  }
  return p;
}

double PlamnProcess::period() const { return std::numbers::pi / kappa; }

PlamnProcess::Coefficients PlamnProcess::draw(GaussianSource& g) const {
  std::vector<double> z(wc.size());
  g.fill(z, 1.0);
  const double c = kernels::dot(wc, z);
  const double s = kernels::dot(ws, z);
  return {det_cos + A * c - B * s, det_sin + A * s + B * c};
}

double PlamnProcess::V(const Coefficients& c, double t) const {
  return c.P * std::cos(kappa * t) + c.R * std::sin(kappa * t);
}

double PlamnProcess::information(const Coefficients& c, double d) const {
  const std::size_t m = wc.size();
  std::vector<double> f(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    const double s = static_cast<double>(j) * ds;
    const double v = V(c, d - s);
    f[j] = std::exp(-2.0 * v0 * s) * v * v;
  }
  return kernels::trapezoid(f, ds);
}

LimitSample sample_plamn_limit(double a, const simul::InitialSegment& x0, double d, std::size_t n,
                               std::size_t m_tail, std::uint64_t seed, unsigned jobs, PlamnKernel kernel) {
  require_draws(n, "PLAMN");
  const PlamnProcess p = PlamnProcess::build(a, x0, m_tail, kernel);
  if (!(d >= 0.0 && d < p.period()))
    throw InvalidPhase("PLAMN phase d = " + std::to_string(d) + " outside [0, " + std::to_string(p.period()) + ")");
  LimitSample out;
  out.regime = Regime::PLAMN;
  out.n = n;
  out.meta.a = a;
  out.meta.d = d;
  out.meta.x0 = x0.describe();
  out.meta.grid_step = p.ds;
  out.meta.seed = seed;
  out.values.resize(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    GaussianSource g(substream_seed(seed, i));
    const PlamnProcess::Coefficients c = p.draw(g);
    const double j = p.information(c, d);
    if (!(j > 0.0)) throw NonpositiveInformation("PLAMN limit: J_a(d) vanished in draw " + std::to_string(i));
    out.values[i] = g() / std::sqrt(j);
  });
  return out;
}

}  // namespace sdde::limits
