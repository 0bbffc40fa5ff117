#include <atomic>
#include <stdexcept>

#include "sdde/kernels.hpp"

namespace sdde::kernels {
namespace {

constexpr KernelTable kScalar{&scalar::sum, &scalar::dot, &scalar::sum_squares};
#if defined(SDDE_HAVE_AVX2)
constexpr KernelTable kAvx2{&avx2::sum, &avx2::dot, &avx2::sum_squares};
#endif

bool cpu_has_avx2() {
#if defined(SDDE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect() { return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar; }

const KernelTable* table_for(Backend b) {
#if defined(SDDE_HAVE_AVX2)
  if (b == Backend::Avx2) return &kAvx2;
#endif
  (void)b;
  return &kScalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> t{table_for(detect())};
  return t;
}

}  // namespace

bool avx2_available() {
  static const bool ok = cpu_has_avx2();
  return ok;
}

Backend active_backend() {
#if defined(SDDE_HAVE_AVX2)
  if (current().load(std::memory_order_acquire) == &kAvx2) return Backend::Avx2;
#endif
  return Backend::Scalar;
}

std::string_view backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_available())
    throw std::invalid_argument("AVX2 kernels are not available on this machine");
  current().store(table_for(b), std::memory_order_release);
}

void reset_backend() { current().store(table_for(detect()), std::memory_order_release); }

const KernelTable& table() { return *current().load(std::memory_order_acquire); }

}  // namespace sdde::kernels
