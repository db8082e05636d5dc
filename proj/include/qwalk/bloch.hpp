#pragma once

// Floquet band structure of a two-band step protocol.
//
// Conventions used throughout:
//   U(q) = exp(-i ε n·σ), ε in [0, π]; the bands are +ε (upper) and -ε (lower).
//   Quasi-energy of a U eigenvalue λ is -arg λ, so φ± satisfies U φ± = e^{∓iε} φ±.
//   Berry curvature Ω± = ±(1/2) n·(∂_qx n × ∂_qy n); with this sign the lower
//   band of U(π/2) has Chern number +1.
//   BZ grids sample q = -π + 2π i/n, i = 0..n-1 (periodic).

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "qwalk/coin_ops.hpp"

namespace qw {

enum class Band { Lower = -1, Upper = +1 };

inline int sign(Band b) { return static_cast<int>(b); }

struct BlochSample {
  Quasimomentum q;
  double epsilon = 0.0;
  Eigen::Vector3d n = Eigen::Vector3d::Zero();
  Spinor phi_plus = Spinor::Zero();
  Spinor phi_minus = Spinor::Zero();
  double omega = 0.0;  // lower-band curvature; filled by bz_grid

  const Spinor& eigenspinor(Band b) const { return b == Band::Upper ? phi_plus : phi_minus; }
};

// Right-hand side of the closed-form dispersion:
// cos ε = (A² - AB(cos qx + cos qy) - B² cos(qx - qy))/√2, A = cos δ/2, B = sin δ/2.
double cos_quasi_energy(Quasimomentum q, double delta);

// Closed form, principal branch. |cos ε| > 1 + 1e-9 raises numerical-domain.
double quasi_energy(Quasimomentum q, double delta);

// ε of an arbitrary protocol from its Bloch matrix (atan2 of the Pauli parts).
double quasi_energy(const StepProtocol& protocol, Quasimomentum q);

// (ε, n, φ±) from an SU(2) step matrix. sin ε < 1e-8 raises degenerate-point.
BlochSample bloch_from_unitary(const Mat2& u, Quasimomentum q = {});
BlochSample bloch_sample(const StepProtocol& protocol, Quasimomentum q);
BlochSample bloch_hamiltonian(Quasimomentum q, double delta);

// exp(-i ε n·σ)
Mat2 unitary_from_bloch(double epsilon, const Eigen::Vector3d& n);

// ±∇ε by central differences, h = 1e-5.
std::array<double, 2> group_velocity(const StepProtocol& protocol, Quasimomentum q, Band band);
std::array<double, 2> group_velocity(Quasimomentum q, double delta, Band band);

// Curvature from the n-vector, central differences with h = 1e-5.
double berry_curvature(const StepProtocol& protocol, Quasimomentum q, Band band);
double berry_curvature(Quasimomentum q, double delta, Band band);

// Independent check: gauge-invariant loop phase of the band eigenspinor around a
// small square centred on q, divided by its area. Same sign convention.
double berry_curvature_eigenstate(const StepProtocol& protocol, Quasimomentum q, Band band,
                                  double h = 1e-4);

struct ChernResult {
  int value = 0;
  double raw = 0.0;       // plaquette phase sum / 2π before rounding
  double min_gap = 0.0;   // min over the grid of min(2ε, 2(π-ε))
  double max_flux = 0.0;  // largest |plaquette phase|
  int grid_n = 0;
};

// Lattice (plaquette link-phase) Chern number. Any grid gap below 1e-6 raises
// near-critical.
ChernResult chern_number(const StepProtocol& protocol, Band band, int grid_n = 24);
ChernResult chern_number(double delta, Band band, int grid_n = 24);

// Doubles the grid (up to max_grid_n) until no plaquette phase exceeds π/2,
// so the rounding cannot be fooled by curvature concentrated near a small gap.
ChernResult chern_number_adaptive(double delta, Band band, int grid_n = 24,
                                  int max_grid_n = 384);

// Trapezoidal BZ integral of Ω/2π on an n×n periodic grid.
double curvature_integral(const StepProtocol& protocol, Band band, int grid_n = 64);

struct BandGaps {
  double gap0 = 0.0;   // 2 min ε
  double gappi = 0.0;  // 2 (π - max ε)
  Quasimomentum q_min, q_max;
};

// Grid search followed by a local pattern-search refinement.
BandGaps band_gaps(double delta, int grid_n = 101);
BandGaps band_gaps(const StepProtocol& protocol, int grid_n = 101);

struct BZGrid {
  int n_x = 0, n_y = 0;
  double delta = 0.0;
  bool periodic = true;
  std::vector<BlochSample> samples;  // row-major: index = iy * n_x + ix

  const BlochSample& at(int ix, int iy) const { return samples[iy * n_x + ix]; }
};

double grid_coordinate(int i, int n);

// Samples with Ω⁻ filled in. Degenerate points raise.
BZGrid bz_grid(double delta, int n_x, int n_y);

struct PhaseRow {
  double delta = 0.0;
  std::optional<int> chern_minus;  // empty when near-critical
  double gap0 = 0.0;
  double gappi = 0.0;
  std::string note;
};

struct Transition {
  double delta = 0.0;
  double lo = 0.0, hi = 0.0;  // bracket
  char gap = '0';             // '0' or 'p' (π)
  double gap_min = 0.0;
};

struct PhaseDiagram {
  std::vector<PhaseRow> rows;
  std::vector<Transition> transitions;
};

// Chern number and gaps per δ; between rows with different (or undefined)
// Chern numbers the closing δ is located by minimizing the relevant gap.
PhaseDiagram phase_diagram(const std::vector<double>& deltas, double bracket_tol = 1e-4);

}  // namespace qw
