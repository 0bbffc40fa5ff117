#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "oracles.hpp"
#include "sdde/chareq.hpp"
#include "sdde/error.hpp"
#include "sdde/harness.hpp"
#include "sdde/limits.hpp"
#include "sdde/rng.hpp"

using namespace sdde;
using namespace sdde::limits;
using simul::InitialSegment;

namespace {

// From the independent numpy simulator (tests/oracles/wiener_functionals.py,
// n = 1e5 draws, m = 1e5 steps).
constexpr double kDfNegative = 0.68373;  // exact: P(chi2_1 < 1) = 0.682689
constexpr double kDfMedian = -0.85774;
constexpr double kCriticalMedian = 0.90513;
constexpr double kCriticalDensityAtMedian = 0.08737;
constexpr double kDfDensityAtMedian = 0.18394;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  return v[static_cast<std::size_t>(p * static_cast<double>(v.size() - 1))];
}

// Quartile skewness; bounded and robust to the heavy tails of Z / sqrt(J).
double bowley(const std::vector<double>& v) {
  const double q1 = quantile(v, 0.25), q2 = quantile(v, 0.5), q3 = quantile(v, 0.75);
  return (q3 + q1 - 2.0 * q2) / (q3 - q1);
}

double fraction_below(const std::vector<double>& v, double x) {
  return static_cast<double>(std::count_if(v.begin(), v.end(), [x](double s) { return s < x; })) /
         static_cast<double>(v.size());
}

std::vector<double> brownian_increments(std::size_t m, std::uint64_t seed) {
  GaussianSource g(seed);
  std::vector<double> dw(m);
  g.fill(dw, std::sqrt(1.0 / static_cast<double>(m)));
  return dw;
}

}  // namespace

TEST_CASE("LAN limit is N(0, 1/j)") {
  for (double j : {1.0, 4.0}) {
    const LimitSample s = sample_lan_limit(j, 20000, 3);
    CHECK(s.values.size() == 20000);
    CHECK(s.n == 20000);
    CHECK(s.regime == Regime::LAN);
    const oracle::Moments m = oracle::moments(s.values);
    CHECK(std::abs(m.var - 1.0 / j) < 3.0 * std::sqrt(2.0 / 20000.0) / j);
    CHECK(std::abs(m.mean) < 3.0 * m.se);
  }
  CHECK_THROWS_AS(sample_lan_limit(0.0, 10, 1), NonpositiveInformation);
  CHECK_THROWS_AS(sample_lan_limit(-1.0, 10, 1), NonpositiveInformation);
  CHECK_THROWS_AS(sample_lan_limit(std::numeric_limits<double>::quiet_NaN(), 10, 1), NonpositiveInformation);
}

TEST_CASE("discrete Ito identities") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto dw1 = brownian_increments(10000, 2 * s);
    const auto dw2 = brownian_increments(10000, 2 * s + 1);
    const WienerFunctionals f = wiener_functionals(dw1, dw2);
    double w1 = 0.0, w2 = 0.0, q1 = 0.0, q2 = 0.0;
    for (std::size_t j = 0; j < dw1.size(); ++j) {
      w1 += dw1[j];
      w2 += dw2[j];
      q1 += dw1[j] * dw1[j];
      q2 += dw2[j] * dw2[j];
    }
    CHECK(std::abs(f.ito11 - 0.5 * (w1 * w1 - q1)) < 1e-12);
    CHECK(std::abs(f.ito22 - 0.5 * (w2 * w2 - q2)) < 1e-12);
    CHECK(std::abs((f.ito11 + f.ito22) - 0.5 * (w1 * w1 + w2 * w2 - q1 - q2)) < 1e-12);
  }
}

TEST_CASE("Levy area: swapping the paths negates it, a quarter rotation keeps it") {
  const auto dw1 = brownian_increments(5000, 1);
  const auto dw2 = brownian_increments(5000, 2);
  std::vector<double> minus1(dw1.size());
  for (std::size_t j = 0; j < dw1.size(); ++j) minus1[j] = -dw1[j];
  const double area = wiener_functionals(dw1, dw2).area;
  CHECK(std::abs(wiener_functionals(dw2, dw1).area + area) < 1e-12);
  CHECK(std::abs(wiener_functionals(dw2, minus1).area - area) < 1e-12);
}

TEST_CASE("Levy area term is symmetric about zero") {
  std::vector<double> v;
  for (std::uint64_t s = 0; s < 5000; ++s) {
    const auto dw1 = brownian_increments(1000, substream_seed(8, 2 * s));
    const auto dw2 = brownian_increments(1000, substream_seed(8, 2 * s + 1));
    v.push_back(16.0 * std::numbers::pi * wiener_functionals(dw1, dw2).area);
  }
  const oracle::Moments m = oracle::moments(v);
  CHECK(std::abs(m.mean) < 3.0 * m.se);
}

TEST_CASE("Dickey-Fuller limit against the oracle") {
  const LimitSample s = sample_df_limit(5000, 10000, 17);
  CHECK(s.regime == Regime::LAQ_ZERO);
  CHECK(s.meta.grid_step == 1e-4);
  const double p = fraction_below(s.values, 0.0);
  CHECK(std::abs(p - 0.68) < 0.02);
  CHECK(std::abs(p - kDfNegative) < 3.0 * std::sqrt(kDfNegative * (1.0 - kDfNegative) / 5000.0));
  const double se_median = 1.0 / (2.0 * kDfDensityAtMedian * std::sqrt(5000.0));
  CHECK(std::abs(median(s.values) - kDfMedian) < 3.0 * se_median);
}

TEST_CASE("critical limit against the oracle") {
  const LimitSample s = sample_critical_limit(5000, 10000, 19);
  CHECK(s.regime == Regime::LAQ_CRITICAL);
  const double se_median = 1.0 / (2.0 * kCriticalDensityAtMedian * std::sqrt(5000.0));
  CHECK(std::abs(median(s.values) - kCriticalMedian) < 3.0 * se_median);
}

TEST_CASE("Wiener samplers are deterministic and thread-count independent") {
  const LimitSample a = sample_df_limit(200, 1000, 5);
  const LimitSample b = sample_df_limit(200, 1000, 5, 3);
  const LimitSample c = sample_df_limit(200, 1000, 6);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(sample_critical_limit(100, 1000, 5).values == sample_critical_limit(100, 1000, 5, 4).values);
  CHECK_THROWS_AS(sample_df_limit(10, 999, 1), InvalidGrid);
  CHECK_THROWS_AS(sample_critical_limit(10, 500, 1), InvalidGrid);
}

TEST_CASE("Wiener functionals converge under grid refinement") {
  // coarse paths are pair sums of the fine increments, so the two samples
  // differ only by discretisation
  const std::size_t m = 1000, n = 2000;
  std::vector<double> df_c, df_f, cr_c, cr_f;
  for (std::uint64_t s = 0; s < n; ++s) {
    const auto f1 = brownian_increments(2 * m, substream_seed(3, 2 * s));
    const auto f2 = brownian_increments(2 * m, substream_seed(3, 2 * s + 1));
    std::vector<double> c1(m), c2(m);
    for (std::size_t j = 0; j < m; ++j) {
      c1[j] = f1[2 * j] + f1[2 * j + 1];
      c2[j] = f2[2 * j] + f2[2 * j + 1];
    }
    df_c.push_back(df_ratio(wiener_functionals(c1, {})));
    df_f.push_back(df_ratio(wiener_functionals(f1, {})));
    cr_c.push_back(critical_ratio(wiener_functionals(c1, c2)));
    cr_f.push_back(critical_ratio(wiener_functionals(f1, f2)));
  }
  CHECK(harness::ks_distance(df_c, df_f) < 0.02);
  CHECK(harness::ks_distance(cr_c, cr_f) < 0.02);
}

TEST_CASE("LAMN tail integral has the Ito variance") {
  const LamnProcess p = LamnProcess::build(1.0, InitialSegment::constant(0.0), 8000);
  CHECK(p.deterministic == 0.0);
  std::vector<double> u2;
  GaussianSource g(4);
  for (int i = 0; i < 10000; ++i) {
    const double u = p.draw_u(g);
    u2.push_back(u * u);
  }
  CHECK(std::abs(oracle::moments(u2).mean * 2.0 * p.v0 - 1.0) < 0.05);
}

TEST_CASE("LAMN deterministic part for a constant segment") {
  const double a = 1.0;
  const double v0 = oracle::bisect_positive_root(a);
  const LamnProcess p = LamnProcess::build(a, InitialSegment::constant(1.0), 100);
  // int_{-1}^0 int_u^0 e^{-v0 (s-u)} ds du = (1 - (1 - e^{-v0}) / v0) / v0
  const double inner = (1.0 - (1.0 - std::exp(-v0)) / v0) / v0;
  CHECK(std::abs(p.deterministic - (1.0 + a * inner)) < 1e-6);
  const double q = v0 * v0 + 2.0 * v0 - a;
  CHECK(p.info_factor == doctest::Approx(std::pow(1.0 - std::exp(-v0), 2) / (2.0 * v0 * q * q)).epsilon(1e-12));
  CHECK(p.ds * 100.0 == doctest::Approx(std::log(1e8) / v0).epsilon(1e-12));
}

TEST_CASE("LAMN limit is symmetric and finite") {
  for (double x0 : {0.0, 1.0}) {
    const LimitSample s = sample_lamn_limit(1.0, InitialSegment::constant(x0), 10000, 2000, 12);
    CHECK(s.regime == Regime::LAMN);
    for (double v : s.values) CHECK(std::isfinite(v));
    CHECK(std::abs(bowley(s.values)) < 0.1);
    CHECK(std::abs(fraction_below(s.values, 0.0) - 0.5) < 3.0 * 0.5 / std::sqrt(10000.0));
  }
  CHECK_THROWS_AS(sample_lamn_limit(-1.0, InitialSegment::constant(1.0), 10, 100, 1), UnsupportedRegime);
  CHECK_THROWS_AS(sample_lamn_limit(0.0, InitialSegment::constant(1.0), 10, 100, 1), UnsupportedRegime);
  CHECK(sample_lamn_limit(2.0, InitialSegment::constant(1.0), 50, 500, 9).values ==
        sample_lamn_limit(2.0, InitialSegment::constant(1.0), 50, 500, 9, 3).values);
}

TEST_CASE("LAMN mixed-normal structure: Delta / sqrt(J) is N(0,1) within bins of J") {
  const LamnProcess p = LamnProcess::build(1.0, InitialSegment::constant(1.0), 2000);
  std::vector<std::pair<double, double>> draws;  // (J, Delta)
  for (std::uint64_t i = 0; i < 20000; ++i) {
    GaussianSource g(substream_seed(77, i));
    const double u = p.draw_u(g);
    const double j = p.info_factor * u * u;
    draws.emplace_back(j, g() * std::sqrt(j));
  }
  std::sort(draws.begin(), draws.end());
  const std::size_t bins = 10, per = draws.size() / bins;
  for (std::size_t b = 0; b < bins; ++b) {
    std::vector<double> z;
    for (std::size_t i = b * per; i < (b + 1) * per; ++i) z.push_back(draws[i].second / std::sqrt(draws[i].first));
    CHECK(std::abs(oracle::moments(z).var - 1.0) < 3.0 * std::sqrt(2.0 / static_cast<double>(per)));
  }
}

TEST_CASE("PLAMN coefficients reproduce the Wiener-integral quadrature") {
  const double a = -6.0;
  std::vector<double> seg(101);
  for (std::size_t i = 0; i < seg.size(); ++i) seg[i] = 1.0 + 0.3 * std::cos(0.05 * static_cast<double>(i));
  const InitialSegment x0 = InitialSegment::sampled(seg);
  for (PlamnKernel kernel : {PlamnKernel::DelayAveraged, PlamnKernel::Fundamental}) {
    const PlamnProcess p = PlamnProcess::build(a, x0, 3000, kernel);
    const chareq::ResidueData r =
        kernel == PlamnKernel::DelayAveraged ? chareq::averaged_residue(a) : chareq::residue_constants(a);
    CHECK(p.A == r.A0);
    CHECK(p.B == r.B0);
    auto phi = [&](double t) { return r.A0 * std::cos(r.kappa0 * t) + r.B0 * std::sin(r.kappa0 * t); };

    GaussianSource g1(55), g2(55);
    const PlamnProcess::Coefficients c = p.draw(g1);
    std::vector<double> z(3000);
    g2.fill(z, 1.0);
    for (double t : {0.0, 0.4, -2.0, 7.3}) {
      double noise = 0.0;
      for (std::size_t j = 0; j < z.size(); ++j) {
        const double s = static_cast<double>(j) * p.ds;
        noise += phi(t - s) * std::exp(-r.v0 * s) * std::sqrt(p.ds) * z[j];
      }
      // a int int phi(t + u - s) e^{-v0 (s - u)} X0(s) ds du by brute-force nested trapezoid
      const std::size_t m = 100;
      const double h = 0.01;
      double outer = 0.0;
      for (std::size_t i = 0; i <= m; ++i) {
        double inner = 0.0;
        for (std::size_t j = i; j <= m; ++j) {
          const double u = -1.0 + i * h, s = -1.0 + j * h;
          inner += ((j == i || j == m) ? 0.5 : 1.0) * phi(t + u - s) * std::exp(-r.v0 * (s - u)) * seg[j] * h;
        }
        if (i == m) inner = 0.0;
        outer += ((i == 0 || i == m) ? 0.5 : 1.0) * inner * h;
      }
      const double expected = phi(t) * seg.back() + a * outer + noise;
      CHECK(std::abs(p.V(c, t) - expected) < 1e-10 * (1.0 + std::abs(expected)));
    }
  }
}

TEST_CASE("PLAMN information is positive and pi/kappa0-periodic in the phase") {
  const PlamnProcess p = PlamnProcess::build(-6.0, InitialSegment::constant(1.0), 4000);
  for (std::uint64_t i = 0; i < 50; ++i) {
    GaussianSource g(substream_seed(6, i));
    const PlamnProcess::Coefficients c = p.draw(g);
    for (double d : {0.0, 0.3, 0.9}) {
      const double j = p.information(c, d);
      CHECK(j > 0.0);
      CHECK(std::abs(p.information(c, d + 2.0 * p.period()) - j) <= 1e-10 * j);
      CHECK(std::abs(p.information(c, d + p.period()) - j) <= 1e-10 * j);
    }
  }
}

TEST_CASE("PLAMN information matches its closed form") {
  const PlamnProcess p = PlamnProcess::build(-10.0, InitialSegment::constant(0.5), 8000);
  GaussianSource g(1);
  const PlamnProcess::Coefficients c = p.draw(g);
  for (double d : {0.0, 0.2}) {
    // V(d - s)^2 = (P^2+R^2)/2 + Re[(P - iR)^2 e^{2i kappa (d-s)}]/2
    const std::complex<double> w(c.P, -c.R);
    const std::complex<double> k(2.0 * p.v0, 2.0 * p.kappa);
    const double exact = (c.P * c.P + c.R * c.R) / (4.0 * p.v0) +
                         0.5 * std::real(w * w * std::exp(std::complex<double>(0.0, 2.0 * p.kappa * d)) / k);
    CHECK(std::abs(p.information(c, d) - exact) < 1e-4 * exact);
  }
}

TEST_CASE("PLAMN mean information against a double quadrature") {
  const double a = -6.0;
  const PlamnProcess p = PlamnProcess::build(a, InitialSegment::constant(0.0), 4000);
  const double v0 = p.v0, kappa = p.kappa, A = p.A, B = p.B;
  auto phi = [&](double t) { return A * std::cos(kappa * t) + B * std::sin(kappa * t); };
  // E[V(t)^2] = int_0^inf phi(t-u)^2 e^{-2 v0 u} du; E[J(0)] = int_0^inf e^{-2 v0 s} E[V(-s)^2] ds
  const double L = std::log(1e8) / v0, h = 0.02;
  const auto n = static_cast<std::size_t>(L / h);
  auto ev2 = [&](double t) {
    double acc = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      const double u = static_cast<double>(i) * h;
      acc += ((i == 0 || i == n) ? 0.5 : 1.0) * phi(t - u) * phi(t - u) * std::exp(-2.0 * v0 * u);
    }
    return acc * h;
  };
  double expected = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) * h;
    expected += ((i == 0 || i == n) ? 0.5 : 1.0) * std::exp(-2.0 * v0 * s) * ev2(-s);
  }
  expected *= h;

  std::vector<double> js;
  for (std::uint64_t i = 0; i < 5000; ++i) {
    GaussianSource g(substream_seed(21, i));
    js.push_back(p.information(p.draw(g), 0.0));
  }
  CHECK(std::abs(oracle::moments(js).mean / expected - 1.0) < 0.05);
}

TEST_CASE("PLAMN sampler preconditions and symmetry") {
  const InitialSegment one = InitialSegment::constant(1.0);
  const double period = std::numbers::pi / chareq::leading_root(-6.0).kappa0;
  CHECK_THROWS_AS(sample_plamn_limit(-6.0, one, -0.1, 10, 100, 1), InvalidPhase);
  CHECK_THROWS_AS(sample_plamn_limit(-6.0, one, period, 10, 100, 1), InvalidPhase);
  CHECK_THROWS_AS(sample_plamn_limit(-1.0, one, 0.0, 10, 100, 1), UnsupportedRegime);
  CHECK_THROWS_AS(sample_plamn_limit(kCriticalDrift, one, 0.0, 10, 100, 1), UnsupportedRegime);
  const LimitSample s = sample_plamn_limit(-6.0, one, 0.0, 10000, 2000, 4);
  CHECK(s.regime == Regime::PLAMN);
  CHECK(s.meta.d == 0.0);
  for (double v : s.values) CHECK(std::isfinite(v));
  CHECK(std::abs(bowley(s.values)) < 0.1);
  CHECK(std::abs(fraction_below(s.values, 0.0) - 0.5) < 3.0 * 0.5 / std::sqrt(10000.0));
  CHECK(sample_plamn_limit(-6.0, one, 0.2, 40, 500, 3).values ==
        sample_plamn_limit(-6.0, one, 0.2, 40, 500, 3, 2).values);
}

TEST_CASE("limit samplers reject empty requests") {
  CHECK_THROWS_AS(sample_lan_limit(1.0, 0, 1), EmptySample);
  CHECK_THROWS_AS(sample_df_limit(0, 1000, 1), EmptySample);
}
