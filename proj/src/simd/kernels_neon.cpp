// NEON variants for aarch64. One float64x2_t holds one complex amplitude.

#include <arm_neon.h>

#include "qwalk/simd/kernels.hpp"

namespace qw::simd::detail {
namespace {

inline const double* raw(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* raw(cplx* p) { return reinterpret_cast<double*>(p); }

struct Packed {
  float64x2_t re;      // [y.re, y.re]
  float64x2_t im_sgn;  // [-y.im, y.im]
};

inline Packed pack(cplx y) {
  const double im[2] = {-y.imag(), y.imag()};
  return {vdupq_n_f64(y.real()), vld1q_f64(im)};
}

inline float64x2_t cmul(float64x2_t x, const Packed& y) {
  const float64x2_t swapped = vextq_f64(x, x, 1);
  return vfmaq_f64(vmulq_f64(x, y.re), swapped, y.im_sgn);
}

void apply_coin(std::span<cplx> amp, const Coin2& m) {
  const Packed a = pack(m.m00), b = pack(m.m01), c = pack(m.m10), d = pack(m.m11);
  double* p = raw(amp.data());
  const std::size_t sites = amp.size() / 2;
  for (std::size_t s = 0; s < sites; ++s, p += 4) {
    const float64x2_t l = vld1q_f64(p);
    const float64x2_t r = vld1q_f64(p + 2);
    vst1q_f64(p, vaddq_f64(cmul(l, a), cmul(r, b)));
    vst1q_f64(p + 2, vaddq_f64(cmul(l, c), cmul(r, d)));
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

  const Packed diag = pack(c.diag), up = pack(c.up), down = pack(c.down);
  const double* src = raw(in.data());
  double* dst = raw(out.data());
  for (std::size_t s = stride; s + stride < sites; ++s) {
    const float64x2_t l = vld1q_f64(src + 4 * s);
    const float64x2_t r = vld1q_f64(src + 4 * s + 2);
    const float64x2_t r_next = vld1q_f64(src + 4 * (s + stride) + 2);
    const float64x2_t l_prev = vld1q_f64(src + 4 * (s - stride));
    vst1q_f64(dst + 4 * s, vaddq_f64(cmul(l, diag), cmul(r_next, up)));
    vst1q_f64(dst + 4 * s + 2, vaddq_f64(cmul(l_prev, down), cmul(r, diag)));
  }
  for (std::size_t s = sites - stride; s < sites; ++s) edge_site(s);
}

void site_probabilities(std::span<const cplx> amp, std::span<double> out) {
  const double* p = raw(amp.data());
  const std::size_t sites = amp.size() / 2;
  for (std::size_t s = 0; s < sites; ++s, p += 4) {
    const float64x2_t l = vld1q_f64(p);
    const float64x2_t r = vld1q_f64(p + 2);
    out[s] = vaddvq_f64(vmulq_f64(l, l)) + vaddvq_f64(vmulq_f64(r, r));
  }
}

cplx inner_product(std::span<const cplx> a, std::span<const cplx> b) {
  const double* pa = raw(a.data());
  const double* pb = raw(b.data());
  float64x2_t re = vdupq_n_f64(0.0);
  float64x2_t im = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const float64x2_t va = vld1q_f64(pa + 2 * i);
    const float64x2_t vb = vld1q_f64(pb + 2 * i);
    re = vfmaq_f64(re, va, vb);                    // [ar*br, ai*bi]
    im = vfmaq_f64(im, va, vextq_f64(vb, vb, 1));  // [ar*bi, ai*br]
  }
  return {vgetq_lane_f64(re, 0) + vgetq_lane_f64(re, 1),
          vgetq_lane_f64(im, 0) - vgetq_lane_f64(im, 1)};
}

constexpr KernelTable kNeon{apply_coin, coupled_shift, site_probabilities, inner_product};

}  // namespace

const KernelTable& neon_kernels() noexcept { return kNeon; }

}  // namespace qw::simd::detail
