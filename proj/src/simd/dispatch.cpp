#include <atomic>
#include <cstdlib>
#include <string_view>

#include "qwalk/simd/kernels.hpp"

namespace qw::simd {
namespace {

bool cpu_supports(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(QWALK_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(QWALK_HAVE_NEON)
      return true;  // mandatory on aarch64
#else
      return false;
#endif
  }
  return false;
}

Isa best_isa() noexcept {
  if (cpu_supports(Isa::Avx2)) return Isa::Avx2;
  if (cpu_supports(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa initial_isa() noexcept {
  if (const char* env = std::getenv("QWALK_SIMD")) {
    const std::string_view v{env};
    if (v == "scalar") return Isa::Scalar;
    if (v == "avx2" && cpu_supports(Isa::Avx2)) return Isa::Avx2;
    if (v == "neon" && cpu_supports(Isa::Neon)) return Isa::Neon;
  }
  return best_isa();
}

std::atomic<Isa>& current() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) noexcept { return cpu_supports(isa); }

const KernelTable& kernels_for(Isa isa) noexcept {
  if (!cpu_supports(isa)) return scalar_kernels();
  switch (isa) {
#if defined(QWALK_HAVE_AVX2)
    case Isa::Avx2: return detail::avx2_kernels();
#endif
#if defined(QWALK_HAVE_NEON)
    case Isa::Neon: return detail::neon_kernels();
#endif
    default: return scalar_kernels();
  }
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void select_isa(Isa isa) noexcept {
  current().store(cpu_supports(isa) ? isa : Isa::Scalar, std::memory_order_relaxed);
}

const KernelTable& kernels() noexcept { return kernels_for(active_isa()); }

}  // namespace qw::simd
