#include "sdde/simul.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sdde/error.hpp"
#include "sdde/grid.hpp"
#include "sdde/kernels.hpp"
#include "sdde/rng.hpp"

namespace sdde::simul {

InitialSegment InitialSegment::constant(double c) {
  InitialSegment s;
  s.kind_ = Kind::Constant;
  s.value_ = c;
  return s;
}

InitialSegment InitialSegment::sampled(std::vector<double> values) {
  if (values.size() < 2) throw InvalidGrid("sampled initial segment needs at least two points");
  InitialSegment s;
  s.kind_ = Kind::Sampled;
  s.value_ = values.back();
  s.samples_ = std::move(values);
  return s;
}

std::vector<double> InitialSegment::on_grid(std::size_t per_unit) const {
  if (kind_ == Kind::Constant) return std::vector<double>(per_unit + 1, value_);
  if (samples_.size() != per_unit + 1) {
    throw InvalidGrid("initial segment has " + std::to_string(samples_.size()) + " samples, grid needs " +
                      std::to_string(per_unit + 1));
  }
  return samples_;
}

double InitialSegment::at_zero() const { return kind_ == Kind::Constant ? value_ : samples_.back(); }

std::string InitialSegment::describe() const {
  std::ostringstream os;
  if (kind_ == Kind::Constant) {
    os << "constant(" << value_ << ")";
  } else {
    os << "sampled(" << samples_.size() << " points)";
  }
  return os.str();
}

double SamplePath::time_of(std::size_t i) const {
  return (static_cast<double>(i) - static_cast<double>(per_unit)) * dt;
}

double window_trapezoid(std::span<const double> x, std::size_t k, std::size_t m, double dt) {
  const std::span<const double> w = x.subspan(k, m + 1);
  return dt * (kernels::sum(w) - 0.5 * (w.front() + w.back()));
}

SamplePath simulate_path(const DelayModel& model, double T, double dt, std::uint64_t seed, Noise noise) {
  if (!(T >= 1.0)) throw InvalidGrid("simulate_path: T must be at least 1");
  const Grid g = make_grid(dt, T);

  SamplePath p;
  p.model = model;
  p.dt = g.dt;
  p.T = g.T;
  p.per_unit = g.per_unit;
  p.steps = g.steps;
  p.seed = seed;
  p.noise = noise;

  const std::size_t m = g.per_unit;
  p.x = model.x0.on_grid(m);
  p.x.resize(m + g.steps + 1);
  p.dw.assign(g.steps, 0.0);
  if (noise == Noise::Gaussian) GaussianSource(seed).fill(p.dw, std::sqrt(g.dt));

  const double a = model.a;
  for (std::size_t k = 0; k < g.steps; ++k) {
    const double q = window_trapezoid(p.x, k, m, g.dt);
    p.x[k + m + 1] = p.x[k + m] + a * q * g.dt + p.dw[k];
  }
  return p;
}

namespace {

struct KernelView {
  std::vector<double> reversed;  // reversed[q] = y[K - q]
  std::size_t last = 0;          // K

  explicit KernelView(std::span<const double> y) : reversed(y.rbegin(), y.rend()), last(y.size() - 1) {}

  // y[n - j] for j = 0..len-1 as a contiguous run
  std::span<const double> backwards_from(std::size_t n, std::size_t len) const {
    return std::span<const double>(reversed).subspan(last - n, len);
  }
};

std::size_t checked_index(double t, double dt, std::size_t kernel_size) {
  if (t < 1.0 - 1e-12) throw DomainError("convolution processes are evaluated for t >= 1 only");
  const std::size_t n = steps_to(t, dt);
  if (n >= kernel_size) {
    throw KernelTooShort("kernel covers " + std::to_string((kernel_size - 1) * dt) + " < t = " + std::to_string(t));
  }
  return n;
}

// Nested trapezoid for Z at kernel index n, with X0 sampled on m+1 points.
double initial_term_at(const KernelView& kv, std::span<const double> x0, std::size_t n, std::size_t m, double dt) {
  // y(t + u_i - s_j) = y[n + i - j] = rev[j - i] where rev[q] = y[n - q]
  const std::span<const double> rev = kv.backwards_from(n, m + 1);
  double outer = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t len = m - i + 1;
    const double inner =
        dt * (kernels::dot(rev.first(len), x0.subspan(i, len)) - 0.5 * (rev[0] * x0[i] + rev[m - i] * x0[m]));
    outer += (i == 0 ? 0.5 : 1.0) * inner;  // the i = m row has zero length
  }
  return dt * outer;
}

}  // namespace

std::vector<double> initial_term(std::span<const double> kernel, double dt, const InitialSegment& x0,
                                 std::span<const double> times) {
  const Grid g = make_grid(dt, 1.0);
  const std::vector<double> seg = x0.on_grid(g.per_unit);
  const KernelView kv(kernel);
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    const std::size_t n = checked_index(t, g.dt, kernel.size());
    out.push_back(initial_term_at(kv, seg, n, g.per_unit, g.dt));
  }
  return out;
}

std::vector<double> y_process(std::span<const double> kernel, double dt, const DelayModel& model,
                              std::span<const double> dw, std::span<const double> times) {
  const Grid g = make_grid(dt, 1.0);
  const std::vector<double> seg = model.x0.on_grid(g.per_unit);
  const KernelView kv(kernel);
  const double x00 = model.x0.at_zero();
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    const std::size_t n = checked_index(t, g.dt, kernel.size());
    double v = kernel[n] * x00;
    if (model.a != 0.0) v += model.a * initial_term_at(kv, seg, n, g.per_unit, g.dt);
    if (!dw.empty()) {
      if (dw.size() < n) throw DomainError("y_process: increments do not reach t = " + std::to_string(t));
      v += kernels::dot(kv.backwards_from(n, n), dw.first(n));
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace sdde::simul
