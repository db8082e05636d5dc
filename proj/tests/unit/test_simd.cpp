#include <doctest.h>

#include <random>
#include <vector>

#include "qwalk/lattice_walk.hpp"
#include "qwalk/simd/kernels.hpp"
#include "support.hpp"

using namespace qw;
using simd::Isa;

namespace {

std::vector<simd::cplx> random_amps(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<simd::cplx> v(n);
  for (auto& z : v) z = {g(rng), g(rng)};
  return v;
}

double max_diff(const std::vector<simd::cplx>& a, const std::vector<simd::cplx>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

std::vector<Isa> vector_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Avx2, Isa::Neon})
    if (simd::isa_available(isa)) out.push_back(isa);
  return out;
}

}  // namespace

TEST_CASE("vector kernels agree with the scalar reference") {
  const auto& ref = simd::scalar_kernels();
  std::mt19937_64 rng(42);
  const auto isas = vector_isas();
  if (isas.empty()) MESSAGE("no vector ISA available; only the scalar path is exercised");
  for (Isa isa : isas) {
    CAPTURE(simd::to_string(isa));
    const auto& k = simd::kernels_for(isa);
    // odd sizes exercise the scalar tails
    for (std::size_t sites : {1u, 2u, 3u, 7u, 64u, 131u}) {
      CAPTURE(sites);
      const auto in = random_amps(rng, 2 * sites);
      const auto c = random_amps(rng, 4);
      const simd::Coin2 m{c[0], c[1], c[2], c[3]};

      auto a = in, b = in;
      ref.apply_coin(a, m);
      k.apply_coin(b, m);
      CHECK(max_diff(a, b) < 1e-14);

      for (std::size_t stride : {std::size_t{1}, std::size_t{5}}) {
        const simd::ShiftCoeffs sc{c[0], c[1], c[2]};
        std::vector<simd::cplx> oa(in.size()), ob(in.size());
        ref.coupled_shift(oa, in, stride, sc);
        k.coupled_shift(ob, in, stride, sc);
        CHECK(max_diff(oa, ob) < 1e-14);
      }

      std::vector<double> pa(sites), pb(sites);
      ref.site_probabilities(in, pa);
      k.site_probabilities(in, pb);
      for (std::size_t s = 0; s < sites; ++s) CHECK(pa[s] == doctest::Approx(pb[s]).epsilon(1e-14));

      const auto other = random_amps(rng, 2 * sites);
      CHECK(std::abs(ref.inner_product(in, other) - k.inner_product(in, other)) < 1e-12);
    }
  }
}

TEST_CASE("walk results do not depend on the active ISA") {
  std::mt19937_64 rng(7);
  const WalkerState psi = test::random_state(rng, 2);
  const auto p = protocol_U(1.3);
  const Isa saved = simd::active_isa();
  simd::select_isa(Isa::Scalar);
  const WalkerState ref = evolve(psi, p, 8, 0.2);
  for (Isa isa : vector_isas()) {
    simd::select_isa(isa);
    const WalkerState v = evolve(psi, p, 8, 0.2);
    CHECK(std::abs(std::abs(ref.inner(v)) - 1.0) < 1e-13);
  }
  simd::select_isa(saved);
}

TEST_CASE("coupled shift reference semantics") {
  // out_L[s] = diag L[s] + up R[s+1];  out_R[s] = down L[s-1] + diag R[s]
  const std::vector<simd::cplx> in{{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 0}};
  std::vector<simd::cplx> out(in.size());
  simd::scalar_kernels().coupled_shift(out, in, 1, {{1, 0}, {10, 0}, {100, 0}});
  CHECK(out[0] == simd::cplx(1 + 10 * 4, 0));
  CHECK(out[1] == simd::cplx(2, 0));
  CHECK(out[2] == simd::cplx(3 + 10 * 6, 0));
  CHECK(out[3] == simd::cplx(100 * 1 + 4, 0));
  CHECK(out[4] == simd::cplx(5, 0));
  CHECK(out[5] == simd::cplx(100 * 3 + 6, 0));
}
