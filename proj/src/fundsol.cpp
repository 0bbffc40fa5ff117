#include "sdde/fundsol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sdde/chareq.hpp"
#include "sdde/error.hpp"
#include "sdde/kernels.hpp"

namespace sdde::fundsol {

double FundamentalSolution::x_at(double t) const {
  if (t < 0.0) return x.at(per_unit - steps_to(-t, dt));
  return x.at(per_unit + steps_to(t, dt));
}

double FundamentalSolution::y_at(double t) const { return y.at(steps_to(t, dt)); }

FundamentalSolution fundamental_solution(double a, double t_max, double dt) {
  if (!(t_max >= 1.0)) throw InvalidGrid("fundamental_solution: t_max must be at least 1");
  const Grid g = make_grid(dt, t_max);
  const std::size_t m = g.per_unit;
  const std::size_t n = g.steps;
  const double h = g.dt;

  FundamentalSolution fs;
  fs.a = a;
  fs.dt = h;
  fs.t_max = g.T;
  fs.per_unit = m;
  fs.x.assign(m + n + 1, 0.0);
  fs.x[m] = 1.0;

  // x(t - 1) inside the cell [t_k - 1, t_k - 1 + h] at fraction theta. Cells
  // left of 0 are identically zero, including their right end (x(0-) = 0).
  auto history = [&](std::size_t k, double theta) {
    if (k < m) return 0.0;
    const double lo = fs.x[k], hi = fs.x[k + 1];
    return lo + theta * (hi - lo);
  };

  double xv = 1.0, z = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double h0 = history(k, 0.0), h1 = history(k, 0.5), h2 = history(k, 1.0);
    const double k1x = a * z, k1z = xv - h0;
    const double k2x = a * (z + 0.5 * h * k1z), k2z = (xv + 0.5 * h * k1x) - h1;
    const double k3x = a * (z + 0.5 * h * k2z), k3z = (xv + 0.5 * h * k2x) - h1;
    const double k4x = a * (z + h * k3z), k4z = (xv + h * k3x) - h2;
    xv += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    fs.x[m + k + 1] = xv;
  }
  fs.y = delay_average(fs);
  fs.decay_estimate = fit_decay_rate(fs);
  return fs;
}

std::vector<double> delay_average(const FundamentalSolution& fs) {
  const std::size_t m = fs.per_unit;
  const std::span<const double> xs = fs.x_nonnegative();
  const std::size_t n = xs.size() - 1;
  std::vector<double> y(n + 1, 0.0);
  // The window [t-1, 0) contributes nothing: x vanishes there and the jump
  // at 0 carries no mass. The running window sum is refreshed exactly every
  // m steps so rounding cannot accumulate over long horizons.
  double window = xs[0];
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t lo = k > m ? k - m : 0;
    if (k % m == 0) {
      window = kernels::sum(xs.subspan(lo, k - lo + 1));
    } else {
      window += xs[k];
      if (k > m) window -= xs[lo - 1];
    }
    y[k] = fs.dt * (window - 0.5 * (xs[lo] + xs[k]));
  }
  return y;
}

double fit_decay_rate(const FundamentalSolution& fs) {
  const std::span<const double> xs = fs.x_nonnegative();
  const std::size_t m = fs.per_unit;
  const std::size_t units = (xs.size() - 1) / m;
  if (units < 2) return 0.0;
  // least squares slope of log max|x| over the unit windows of the second half
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  int cnt = 0;
  for (std::size_t u = units / 2; u < units; ++u) {
    double peak = 0.0;
    for (std::size_t i = u * m; i <= (u + 1) * m; ++i) peak = std::max(peak, std::abs(xs[i]));
    if (!(peak > 1e-300)) continue;
    const double t = static_cast<double>(u) + 0.5, l = std::log(peak);
    st += t;
    sl += l;
    stt += t * t;
    stl += t * l;
    ++cnt;
  }
  if (cnt < 2) return -std::numeric_limits<double>::infinity();
  const double denom = cnt * stt - st * st;
  return denom > 0.0 ? (cnt * stl - st * sl) / denom : 0.0;
}

namespace {

double squared_average_integral(const FundamentalSolution& fs) {
  const double sq = kernels::sum_squares(fs.y);
  const double ends = 0.5 * (fs.y.front() * fs.y.front() + fs.y.back() * fs.y.back());
  return fs.dt * (sq - ends);
}

}  // namespace

FisherLimit fisher_limit_detail(double a, double rel_tol) {
  if (chareq::classify_regime(a) != Regime::LAN) {
    throw UnsupportedRegime("fisher_limit: J_a is defined for a in (-pi^2/2, 0), got a = " + std::to_string(a));
  }
  constexpr double kMaxHorizon = 640.0;

  double dt = 1e-2;
  double t_max = 20.0;
  double prev = squared_average_integral(fundamental_solution(a, t_max, dt));
  for (;;) {
    t_max *= 2.0;
    if (t_max > kMaxHorizon) {
      throw NoConvergence("fisher_limit: truncation did not stabilise by t_max = 640");
    }
    const double cur = squared_average_integral(fundamental_solution(a, t_max, dt));
    const bool done = std::abs(cur - prev) < rel_tol * std::abs(cur);
    prev = cur;
    if (done) break;
  }

  FundamentalSolution fs;
  for (;;) {
    dt *= 0.5;
    if (dt < 1e-5) throw NoConvergence("fisher_limit: quadrature did not stabilise by dt = 1e-5");
    fs = fundamental_solution(a, t_max, dt);
    const double cur = squared_average_integral(fs);
    const bool done = std::abs(cur - prev) < rel_tol * std::abs(cur);
    prev = cur;
    if (done) break;
  }

  FisherLimit out;
  out.value = prev;
  out.t_max = t_max;
  out.dt = dt;
  const double rate = fs.decay_estimate;
  double y_peak = 0.0;
  for (std::size_t k = fs.y.size() - 1 - fs.per_unit; k < fs.y.size(); ++k) y_peak = std::max(y_peak, std::abs(fs.y[k]));
  out.tail_bound = rate < 0.0 ? y_peak * y_peak / (-2.0 * rate) : std::numeric_limits<double>::infinity();
  return out;
}

double fisher_limit(double a, double rel_tol) { return fisher_limit_detail(a, rel_tol).value; }

double asymptotic_form(double a, double t) {
  const chareq::ResidueData r = chareq::residue_constants(a);
  return r.psi(t) * std::exp(r.v0 * t);
}

}  // namespace sdde::fundsol
