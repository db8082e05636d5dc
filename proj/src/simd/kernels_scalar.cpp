#include "qwalk/simd/kernels.hpp"

#include <cassert>

namespace qw::simd {
namespace {

void apply_coin(std::span<cplx> amp, const Coin2& m) {
  const std::size_t sites = amp.size() / 2;
  for (std::size_t s = 0; s < sites; ++s) {
    const cplx l = amp[2 * s];
    const cplx r = amp[2 * s + 1];
    amp[2 * s] = m.m00 * l + m.m01 * r;
    amp[2 * s + 1] = m.m10 * l + m.m11 * r;
  }
}

void coupled_shift(std::span<cplx> out, std::span<const cplx> in, std::size_t stride,
                   const ShiftCoeffs& c) {
  assert(out.size() == in.size());
  const std::size_t sites = in.size() / 2;
  for (std::size_t s = 0; s < sites; ++s) {
    const cplx r_next = s + stride < sites ? in[2 * (s + stride) + 1] : cplx{};
    const cplx l_prev = s >= stride ? in[2 * (s - stride)] : cplx{};
    out[2 * s] = c.diag * in[2 * s] + c.up * r_next;
    out[2 * s + 1] = c.down * l_prev + c.diag * in[2 * s + 1];
  }
}

void site_probabilities(std::span<const cplx> amp, std::span<double> out) {
  const std::size_t sites = amp.size() / 2;
  for (std::size_t s = 0; s < sites; ++s)
    out[s] = std::norm(amp[2 * s]) + std::norm(amp[2 * s + 1]);
}

cplx inner_product(std::span<const cplx> a, std::span<const cplx> b) {
  cplx acc{};
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

constexpr KernelTable kScalar{apply_coin, coupled_shift, site_probabilities, inner_product};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace qw::simd
