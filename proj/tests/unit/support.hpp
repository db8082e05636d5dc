#pragma once

// Helpers shared by the unit tests: seeded random states and a
// momentum-space reference evolution that never touches the lattice kernels.

#include <cmath>
#include <random>
#include <vector>

#include "qwalk/coin_ops.hpp"
#include "qwalk/lattice_walk.hpp"

namespace qw::test {

inline WalkerState random_state(std::mt19937_64& rng, int half_width) {
  std::normal_distribution<double> g;
  WalkerState s(Window::around({0, 0}, half_width));
  for (int y = -half_width; y <= half_width; ++y)
    for (int x = -half_width; x <= half_width; ++x)
      for (int c = 0; c < 2; ++c) s.set(x, y, c, {g(rng), g(rng)});
  s.scale(1.0 / std::sqrt(s.norm_squared()));
  return s;
}

inline Spinor random_spinor(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Spinor v(cplx{g(rng), g(rng)}, cplx{g(rng), g(rng)});
  return v / v.norm();
}

// ψ(q) = Σ_m e^{-iq·m} ψ(m) on an L×L torus large enough that nothing wraps,
// multiplied by the Bloch matrices of each step and transformed back.
inline WalkerState momentum_evolve(const WalkerState& in, const StepProtocol& protocol, int steps,
                                   double force = 0.0) {
  const Window& w = in.window();
  const int reach = std::max({std::abs(w.x_min), std::abs(w.x_max), std::abs(w.y_min),
                              std::abs(w.y_max)}) +
                    steps;
  const int L = 2 * reach + 3;
  auto phase = [&](int j, int m) { return std::polar(1.0, -kTwoPi * j * m / L); };

  std::vector<Spinor> psi_q(static_cast<std::size_t>(L) * L, Spinor::Zero());
  for (int jy = 0; jy < L; ++jy)
    for (int jx = 0; jx < L; ++jx) {
      Spinor a = Spinor::Zero();
      for (int y = w.y_min; y <= w.y_max; ++y)
        for (int x = w.x_min; x <= w.x_max; ++x) a += phase(jx, x) * phase(jy, y) * in.spinor(x, y);
      const Quasimomentum q{kTwoPi * jx / L, kTwoPi * jy / L};
      for (int t = 1; t <= steps; ++t) a = step_matrix(protocol, q, t, force).matrix * a;
      psi_q[static_cast<std::size_t>(jy) * L + jx] = a;
    }

  WalkerState out(Window::around({0, 0}, reach));
  for (int y = -reach; y <= reach; ++y)
    for (int x = -reach; x <= reach; ++x) {
      Spinor a = Spinor::Zero();
      for (int jy = 0; jy < L; ++jy)
        for (int jx = 0; jx < L; ++jx)
          a += std::conj(phase(jx, x) * phase(jy, y)) * psi_q[static_cast<std::size_t>(jy) * L + jx];
      a /= static_cast<double>(L) * L;
      out.set(x, y, 0, a(0));
      out.set(x, y, 1, a(1));
    }
  return out;
}

}  // namespace qw::test
