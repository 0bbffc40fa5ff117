#pragma once

// Reduction kernels behind every inner loop of the library: delay-window
// quadrature, Ito sums, observed information and kernel convolutions.
//
// Each kernel has a portable scalar reference and, on x86-64, an AVX2/FMA
// variant. The variant is picked once at startup from CPUID; tests force a
// backend with set_backend() and check the two agree.

#include <cstddef>
#include <span>
#include <string_view>

namespace sdde::kernels {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  double (*sum)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum_squares)(const double*, std::size_t);
};

namespace scalar {
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double sum_squares(const double* x, std::size_t n);
}  // namespace scalar

#if defined(SDDE_HAVE_AVX2)
namespace avx2 {
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double sum_squares(const double* x, std::size_t n);
}  // namespace avx2
#endif

/// True when this binary carries the AVX2 variants and the CPU can run them.
bool avx2_available();

Backend active_backend();
std::string_view backend_name(Backend b);

/// Overrides runtime selection. Throws std::invalid_argument if the backend
/// is unavailable on this machine.
void set_backend(Backend b);

/// Restores the CPUID-based choice.
void reset_backend();

const KernelTable& table();

inline double sum(std::span<const double> x) { return table().sum(x.data(), x.size()); }

inline double dot(std::span<const double> x, std::span<const double> y) {
  return table().dot(x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

inline double sum_squares(std::span<const double> x) {
  return table().sum_squares(x.data(), x.size());
}

/// Composite trapezoid rule over n equally spaced samples with spacing h.
inline double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  return h * (sum(f) - 0.5 * (f.front() + f.back()));
}

}  // namespace sdde::kernels
