#include "sdde/kernels.hpp"

namespace sdde::kernels::scalar {
namespace {

// Eight accumulators combined in the same order as the two 4-lane registers
// of the AVX2 path, so sum() is bit-identical across backends and dot()
// differs only by FMA rounding.
struct Lanes {
  double a[8] = {};

  double reduce() const {
    const double l0 = a[0] + a[4], l1 = a[1] + a[5], l2 = a[2] + a[6], l3 = a[3] + a[7];
    return (l0 + l2) + (l1 + l3);
  }
};

}  // namespace

double sum(const double* x, std::size_t n) {
  Lanes acc;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    for (int k = 0; k < 8; ++k) acc.a[k] += x[i + k];
  if (i + 4 <= n) {
    for (int k = 0; k < 4; ++k) acc.a[k] += x[i + k];
    i += 4;
  }
  double s = acc.reduce();
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot(const double* x, const double* y, std::size_t n) {
  Lanes acc;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8)
    for (int k = 0; k < 8; ++k) acc.a[k] += x[i + k] * y[i + k];
  if (i + 4 <= n) {
    for (int k = 0; k < 4; ++k) acc.a[k] += x[i + k] * y[i + k];
    i += 4;
  }
  double s = acc.reduce();
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum_squares(const double* x, std::size_t n) { return dot(x, x, n); }

}  // namespace sdde::kernels::scalar
