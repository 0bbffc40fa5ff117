#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "sdde/chareq.hpp"
#include "sdde/error.hpp"
#include "sdde/fundsol.hpp"

using namespace sdde;
using namespace sdde::fundsol;
using std::numbers::pi;

namespace {

// J_a values computed with fisher_limit and cross-checked against the Heun
// oracle (dt = 1e-4, t_max = 200) below.
constexpr double kJm05 = 1.09260498978;
constexpr double kJm1 = 0.604230128786;
constexpr double kJm2 = 0.389351936085;
constexpr double kJm4 = 0.559862321646;

double oracle_fisher(double a) {
  const oracle::DelayOde ode = oracle::heun_delay(a, 200.0, 1e-4, true);
  std::vector<double> y2(ode.z.size());
  for (std::size_t i = 0; i < y2.size(); ++i) y2[i] = ode.z[i] * ode.z[i];
  return oracle::trapezoid(y2, 1e-4);
}

}  // namespace

TEST_CASE("initial function") {
  const FundamentalSolution fs = fundamental_solution(-1.0, 3.0, 0.01);
  for (std::size_t i = 0; i < fs.per_unit; ++i) CHECK(fs.x[i] == 0.0);
  CHECK(fs.x[fs.per_unit] == 1.0);
  CHECK(fs.x_at(0.0) == 1.0);
  CHECK(fs.x_at(-0.5) == 0.0);
  CHECK(fs.y.front() == 0.0);
  CHECK(fs.y.size() == 301);
  CHECK(fs.x.size() == 401);
}

TEST_CASE("a = 0 gives x = 1 and y(t) = min(t, 1)") {
  const FundamentalSolution fs = fundamental_solution(0.0, 5.0, 0.01);
  for (double v : fs.x_nonnegative()) CHECK(v == 1.0);
  for (std::size_t i = 0; i <= fs.steps(); ++i) {
    const double t = static_cast<double>(i) * fs.dt;
    CHECK(fs.y[i] == doctest::Approx(std::min(t, 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("first-interval closed forms") {
  const FundamentalSolution m1 = fundamental_solution(-1.0, 2.0, 1e-3);
  CHECK(std::abs(m1.x_at(1.0) - std::cos(1.0)) < 1e-8);
  CHECK(std::abs(m1.y_at(1.0) - std::sin(1.0)) < 1e-6);
  CHECK(std::abs(m1.x_at(0.5) - std::cos(0.5)) < 1e-8);
  const FundamentalSolution p1 = fundamental_solution(1.0, 2.0, 1e-3);
  CHECK(std::abs(p1.x_at(1.0) - std::cosh(1.0)) < 1e-8);
  CHECK(std::abs(p1.y_at(1.0) - std::sinh(1.0)) < 1e-6);
  const FundamentalSolution m4 = fundamental_solution(-4.0, 1.0, 1e-3);
  CHECK(std::abs(m4.x_at(0.7) - std::cos(2.0 * 0.7)) < 1e-8);
}

TEST_CASE("second interval agrees with the Heun oracle") {
  for (double a : {-6.0, -1.0, 1.0}) {
    CAPTURE(a);
    const FundamentalSolution fs = fundamental_solution(a, 5.0, 1e-3);
    const oracle::DelayOde ode = oracle::heun_delay(a, 5.0, 1e-4, true);
    for (double t : {1.5, 2.0, 3.7, 5.0}) {
      const auto k = static_cast<std::size_t>(std::llround(t / 1e-4));
      CHECK(std::abs(fs.x_at(t) - ode.x[k]) < 1e-6 * (1.0 + std::abs(ode.x[k])));
      CHECK(std::abs(fs.y_at(t) - ode.z[k]) < 1e-5 * (1.0 + std::abs(ode.z[k])));
    }
  }
}

TEST_CASE("delay_average reproduces y") {
  const FundamentalSolution fs = fundamental_solution(-2.0, 10.0, 0.005);
  const std::vector<double> y = delay_average(fs);
  REQUIRE(y.size() == fs.y.size());
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(y[i] - fs.y[i]) < 1e-12);
}

TEST_CASE("grid preconditions") {
  CHECK_THROWS_AS(fundamental_solution(-1.0, 3.0, 0.03), InvalidGrid);
  CHECK_THROWS_AS(fundamental_solution(-1.0, 0.5, 0.01), InvalidGrid);
  CHECK_THROWS_AS(fundamental_solution(-1.0, 2.005, 0.01), InvalidGrid);
}

TEST_CASE("halving dt reduces the error at least 3.5-fold") {
  for (double a : {-6.0, -1.0, 1.0}) {
    CAPTURE(a);
    const double t = 10.0;
    const double x1 = fundamental_solution(a, t, 0.02).x_at(t);
    const double x2 = fundamental_solution(a, t, 0.01).x_at(t);
    const double x3 = fundamental_solution(a, t, 0.005).x_at(t);
    CHECK(std::abs(x1 - x2) / std::abs(x2 - x3) >= 3.5);
  }
}

TEST_CASE("Fisher limit agrees with the independent Heun integrator") {
  for (auto [a, frozen] : {std::pair{-1.0, kJm1}, std::pair{-4.0, kJm4}}) {
    CAPTURE(a);
    const double j = fisher_limit(a);
    const double o = oracle_fisher(a);
    CHECK(std::abs(j - o) / o < 1e-5);
    CHECK(std::abs(j - frozen) < 1e-9);
  }
  CHECK(std::abs(fisher_limit(-0.5) - kJm05) < 1e-9);
  CHECK(std::abs(fisher_limit(-2.0) - kJm2) < 1e-9);
}

TEST_CASE("Fisher limit needs a longer horizon near the critical drift") {
  const FisherLimit f1 = fisher_limit_detail(-1.0);
  const FisherLimit f4 = fisher_limit_detail(-4.0);
  CHECK(f4.t_max > f1.t_max);
  CHECK(f1.tail_bound < 1e-7 * f1.value);
  CHECK(f4.tail_bound < 1e-7 * f4.value);
  // partial integrals stabilise monotonically over doublings
  const FundamentalSolution fs = fundamental_solution(-4.0, 160.0, 0.005);
  double prev = 0.0, prev_step = 1e300;
  for (double t : {20.0, 40.0, 80.0, 160.0}) {
    std::vector<double> y2(static_cast<std::size_t>(std::llround(t / fs.dt)) + 1);
    for (std::size_t i = 0; i < y2.size(); ++i) y2[i] = fs.y[i] * fs.y[i];
    const double v = oracle::trapezoid(y2, fs.dt);
    CHECK(v >= prev);
    CHECK(v - prev < prev_step);
    prev_step = v - prev;
    prev = v;
  }
}

TEST_CASE("Fisher limit obeys the crude upper bound") {
  for (double a : {-0.5, -1.0, -2.0, -4.0}) {
    CAPTURE(a);
    const FundamentalSolution fs = fundamental_solution(a, 300.0, 0.005);
    std::vector<double> y01(fs.per_unit + 1), x2(fs.steps() + 1);
    for (std::size_t i = 0; i < y01.size(); ++i) y01[i] = fs.y[i] * fs.y[i];
    for (std::size_t i = 0; i < x2.size(); ++i) x2[i] = fs.x[fs.per_unit + i] * fs.x[fs.per_unit + i];
    CHECK(fisher_limit(a) <= oracle::trapezoid(y01, fs.dt) + oracle::trapezoid(x2, fs.dt));
  }
}

TEST_CASE("Fisher limit outside the LAN regime") {
  CHECK_THROWS_AS(fisher_limit(0.5), UnsupportedRegime);
  CHECK_THROWS_AS(fisher_limit(0.0), UnsupportedRegime);
  CHECK_THROWS_AS(fisher_limit(-6.0), UnsupportedRegime);
  CHECK_THROWS_AS(fisher_limit(kCriticalDrift), UnsupportedRegime);
}

TEST_CASE("decay estimate tracks the leading real part") {
  for (double a : {-1.0, -2.0}) {
    const FundamentalSolution fs = fundamental_solution(a, 20.0, 0.01);
    CHECK(std::abs(fs.decay_estimate - chareq::leading_root(a).v0) < 0.1);
  }
}

TEST_CASE("asymptotic form for a = 1 at t = 15") {
  const FundamentalSolution fs = fundamental_solution(1.0, 15.0, 1e-3);
  const double v = asymptotic_form(1.0, 15.0);
  const double v0 = oracle::bisect_positive_root(1.0);
  CHECK(v == doctest::Approx(v0 / (v0 * v0 + 2.0 * v0 - 1.0) * std::exp(15.0 * v0)).epsilon(1e-12));
  CHECK(std::abs(fs.x_at(15.0) - v) / v < 1e-4);
}

TEST_CASE("asymptotic form at the critical drift") {
  CHECK(std::abs(asymptotic_form(kCriticalDrift, 10.0) - 16.0 / (pi * pi + 16.0)) < 1e-12);
  const FundamentalSolution fs = fundamental_solution(kCriticalDrift, 30.0, 1e-3);
  CHECK(std::abs(fs.x_at(30.0) - asymptotic_form(kCriticalDrift, 30.0)) < 1e-4);
}

TEST_CASE("asymptotic envelope of a = -6 is periodic") {
  const chareq::LeadingRoot r = chareq::leading_root(-6.0);
  const double period = 2.0 * pi / r.kappa0;
  for (double t : {3.0, 7.5, 12.25}) {
    const double e1 = asymptotic_form(-6.0, t) / std::exp(r.v0 * t);
    const double e2 = asymptotic_form(-6.0, t + period) / std::exp(r.v0 * (t + period));
    CHECK(std::abs(e1 - e2) < 1e-10);
  }
}

TEST_CASE("x e^{-v0 t} settles for a > 0") {
  for (double a : {0.5, 1.0, 3.0}) {
    CAPTURE(a);
    const double v0 = chareq::leading_root(a).v0;
    const FundamentalSolution fs = fundamental_solution(a, 30.0, 1e-3);
    const double late = fs.x_at(30.0) * std::exp(-30.0 * v0);
    const double early = fs.x_at(25.0) * std::exp(-25.0 * v0);
    CHECK(std::abs(late - early) / std::abs(late) < 1e-4);
  }
}

TEST_CASE("x e^{-v0 t} approaches the sinusoid for a < -pi^2/2") {
  for (double a : {-6.0, -10.0}) {
    CAPTURE(a);
    const chareq::ResidueData r = chareq::residue_constants(a);
    const FundamentalSolution fs = fundamental_solution(a, 40.0, 1e-3);
    const double period = 2.0 * pi / r.kappa0;
    double worst = 0.0;
    for (std::size_t i = 0; i <= fs.steps(); ++i) {
      const double t = static_cast<double>(i) * fs.dt;
      if (t < 40.0 - period) continue;
      worst = std::max(worst, std::abs(fs.x[fs.per_unit + i] * std::exp(-r.v0 * t) - r.psi(t)));
    }
    CHECK(worst < 1e-3);
  }
}
