#include "sdde/inference.hpp"

#include <span>

#include "sdde/chareq.hpp"
#include "sdde/error.hpp"
#include "sdde/kernels.hpp"

namespace sdde::inference {

std::vector<double> delay_integral(const simul::SamplePath& path) {
  std::vector<double> q(path.steps + 1);
  for (std::size_t k = 0; k <= path.steps; ++k) q[k] = simul::window_trapezoid(path.x, k, path.per_unit, path.dt);
  return q;
}

namespace {

// Q_0..Q_{N-1} and the matching increments of x.
struct Sums {
  std::vector<double> q;
  std::vector<double> dx;

  explicit Sums(const simul::SamplePath& path) : q(delay_integral(path)), dx(path.steps) {
    q.pop_back();
    const std::size_t m = path.per_unit;
    for (std::size_t k = 0; k < path.steps; ++k) dx[k] = path.x[m + k + 1] - path.x[m + k];
  }
};

}  // namespace

double observed_information(const simul::SamplePath& path) {
  std::vector<double> q = delay_integral(path);
  q.pop_back();
  return kernels::sum_squares(q) * path.dt;
}

double score_dx(const simul::SamplePath& path) {
  const Sums s(path);
  return kernels::dot(s.q, s.dx);
}

double score_dw(const simul::SamplePath& path) {
  if (!path.has_increments()) throw MissingIncrements("path carries no Brownian increments");
  std::vector<double> q = delay_integral(path);
  q.pop_back();
  return kernels::dot(q, path.dw);
}

EstimateResult mle(const simul::SamplePath& path) {
  const Sums s(path);
  EstimateResult r;
  r.numerator = kernels::dot(s.q, s.dx);
  r.denominator = kernels::sum_squares(s.q) * path.dt;
  r.T = path.T;
  r.dt = path.dt;
  if (!(r.denominator > 0.0)) {
    throw DegenerateDenominator("mle: int Q^2 dt vanishes; the path carries no information about a");
  }
  r.a_hat = r.numerator / r.denominator;
  return r;
}

LocalQuadratic local_quadratic(const simul::SamplePath& path, double a_ref, double h) {
  if (!path.has_increments()) throw MissingIncrements("local_quadratic needs the path's Brownian increments");
  std::vector<double> q = delay_integral(path);
  q.pop_back();
  LocalQuadratic lq;
  lq.a_ref = a_ref;
  lq.h = h;
  lq.r = chareq::scaling(a_ref, path.T);
  lq.delta = lq.r * kernels::dot(q, path.dw);
  lq.j = lq.r * lq.r * kernels::sum_squares(q) * path.dt;
  lq.loglik = h * lq.delta - 0.5 * h * h * lq.j;
  return lq;
}

double loglik_ratio(const simul::SamplePath& path, double a, double a_tilde) {
  if (a_tilde == a) return 0.0;
  const Sums s(path);
  const double num = kernels::dot(s.q, s.dx);
  const double den = kernels::sum_squares(s.q) * path.dt;
  return (a_tilde - a) * num - 0.5 * (a_tilde * a_tilde - a * a) * den;
}

double loglik_ratio_dw(const simul::SamplePath& path, double a, double a_tilde) {
  if (!path.has_increments()) throw MissingIncrements("dW form needs the path's Brownian increments");
  std::vector<double> q = delay_integral(path);
  q.pop_back();
  const double d = a_tilde - a;
  return d * kernels::dot(q, path.dw) - 0.5 * d * d * kernels::sum_squares(q) * path.dt;
}

}  // namespace sdde::inference
