// AVX2 + FMA variants. One ymm register holds one lattice site: [L.re, L.im, R.re, R.im].
// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "qwalk/simd/kernels.hpp"

namespace qw::simd::detail {
namespace {

inline const double* raw(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* raw(cplx* p) { return reinterpret_cast<double*>(p); }

// Packed complex constant split for cmul: real parts duplicated, imaginary parts duplicated.
struct Packed {
  __m256d re, im;
};

inline Packed pack(cplx lo, cplx hi) {
  const __m256d y = _mm256_set_pd(hi.imag(), hi.real(), lo.imag(), lo.real());
  return {_mm256_movedup_pd(y), _mm256_permute_pd(y, 0xF)};
}

// Lane-wise complex product x * y for two complex numbers per register.
inline __m256d cmul(__m256d x, const Packed& y) {
  const __m256d swapped = _mm256_permute_pd(x, 0x5);
  return _mm256_fmaddsub_pd(x, y.re, _mm256_mul_pd(swapped, y.im));
}

void apply_coin(std::span<cplx> amp, const Coin2& m) {
  const Packed first = pack(m.m00, m.m10);
  const Packed second = pack(m.m01, m.m11);
  double* p = raw(amp.data());
  const std::size_t sites = amp.size() / 2;
  for (std::size_t s = 0; s < sites; ++s, p += 4) {
    const __m256d v = _mm256_loadu_pd(p);
    const __m256d l = _mm256_permute2f128_pd(v, v, 0x00);
    const __m256d r = _mm256_permute2f128_pd(v, v, 0x11);
    _mm256_storeu_pd(p, _mm256_add_pd(cmul(l, first), cmul(r, second)));
  }
}

void coupled_shift(std::span<cplx> out, std::span<const cplx> in, std::size_t stride,
                   const ShiftCoeffs& c) {
  const std::size_t sites = in.size() / 2;
  if (sites <= 2 * stride) {
    scalar_kernels().coupled_shift(out, in, stride, c);
    return;
  }

  auto edge_site = [&](std::size_t s) {
    const cplx r_next = s + stride < sites ? in[2 * (s + stride) + 1] : cplx{};
    const cplx l_prev = s >= stride ? in[2 * (s - stride)] : cplx{};
    out[2 * s] = c.diag * in[2 * s] + c.up * r_next;
    out[2 * s + 1] = c.down * l_prev + c.diag * in[2 * s + 1];
  };

  for (std::size_t s = 0; s < stride; ++s) edge_site(s);

  const Packed diag = pack(c.diag, c.diag);
  const Packed hop = pack(c.up, c.down);
  const double* src = raw(in.data());
  double* dst = raw(out.data());
  const std::size_t offset = 4 * stride;
  for (std::size_t s = stride; s + stride < sites; ++s) {
    const double* here = src + 4 * s;
    const __m256d v = _mm256_loadu_pd(here);
    const __m256d next = _mm256_loadu_pd(here + offset);
    const __m256d prev = _mm256_loadu_pd(here - offset);
    // [R(s+stride), L(s-stride)]
    const __m256d moved = _mm256_permute2f128_pd(next, prev, 0x21);
    _mm256_storeu_pd(dst + 4 * s, _mm256_add_pd(cmul(v, diag), cmul(moved, hop)));
  }

  for (std::size_t s = sites - stride; s < sites; ++s) edge_site(s);
}

void site_probabilities(std::span<const cplx> amp, std::span<double> out) {
  const std::size_t sites = amp.size() / 2;
  const double* p = raw(amp.data());
  std::size_t s = 0;
  for (; s + 2 <= sites; s += 2, p += 8) {
    const __m256d a = _mm256_loadu_pd(p);
    const __m256d b = _mm256_loadu_pd(p + 4);
    // [|L_s|^2, |L_s+1|^2, |R_s|^2, |R_s+1|^2]
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    const __m128d sum = _mm_add_pd(_mm256_castpd256_pd128(h), _mm256_extractf128_pd(h, 1));
    _mm_storeu_pd(out.data() + s, sum);
  }
  for (; s < sites; ++s) out[s] = std::norm(amp[2 * s]) + std::norm(amp[2 * s + 1]);
}

cplx inner_product(std::span<const cplx> a, std::span<const cplx> b) {
  const double* pa = raw(a.data());
  const double* pb = raw(b.data());
  const std::size_t n = a.size();
  __m256d re = _mm256_setzero_pd();
  __m256d im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    re = _mm256_fmadd_pd(va, vb, re);                              // [ar*br, ai*bi]
    im = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0x5), im);     // [ar*bi, ai*br]
  }
  alignas(32) double r[4], q[4];
  _mm256_store_pd(r, re);
  _mm256_store_pd(q, im);
  cplx acc{(r[0] + r[1]) + (r[2] + r[3]), (q[0] - q[1]) + (q[2] - q[3])};
  for (; i < n; ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

constexpr KernelTable kAvx2{apply_coin, coupled_shift, site_probabilities, inner_product};

}  // namespace

const KernelTable& avx2_kernels() noexcept { return kAvx2; }

}  // namespace qw::simd::detail
