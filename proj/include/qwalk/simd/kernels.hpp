#pragma once

// Data-parallel inner loops of the lattice walk.
//
// Amplitudes are stored as interleaved coin pairs: site s occupies
// amp[2s] (|L>) and amp[2s+1] (|R>). Every kernel has a scalar reference
// implementation; vector variants (AVX2+FMA on x86-64, NEON on aarch64) are
// picked at runtime and must agree with the reference to rounding.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace qw::simd {

using cplx = std::complex<double>;

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

// Row-major 2x2 coin matrix [[m00, m01], [m10, m11]].
struct Coin2 {
  cplx m00, m01, m10, m11;
};

// Coefficients of a coin-coupled shift along one lattice axis:
//   out_L[s] = diag * in_L[s] + up   * in_R[s + stride]
//   out_R[s] = down * in_L[s - stride] + diag * in_R[s]
// Reads outside [0, sites) count as zero.
struct ShiftCoeffs {
  cplx diag, up, down;
};

struct KernelTable {
  void (*apply_coin)(std::span<cplx> amp, const Coin2& m);
  void (*coupled_shift)(std::span<cplx> out, std::span<const cplx> in,
                        std::size_t stride, const ShiftCoeffs& c);
  void (*site_probabilities)(std::span<const cplx> amp, std::span<double> out);
  cplx (*inner_product)(std::span<const cplx> a, std::span<const cplx> b);
};

// Reference implementations, always available.
const KernelTable& scalar_kernels() noexcept;

// True when `isa` was compiled in and the running CPU supports it.
bool isa_available(Isa isa) noexcept;

// Table for a specific ISA; falls back to scalar when unavailable.
const KernelTable& kernels_for(Isa isa) noexcept;

// The active ISA: best available, unless overridden by $QWALK_SIMD
// ("scalar", "avx2", "neon") or select_isa().
Isa active_isa() noexcept;
void select_isa(Isa isa) noexcept;
const KernelTable& kernels() noexcept;

namespace detail {
#if defined(QWALK_HAVE_AVX2)
const KernelTable& avx2_kernels() noexcept;
#endif
#if defined(QWALK_HAVE_NEON)
const KernelTable& neon_kernels() noexcept;
#endif
}  // namespace detail

}  // namespace qw::simd
