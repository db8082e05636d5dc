#pragma once

// Wavepackets, group velocities and the anomalous-displacement measurement
// of the Chern number.
//
// Force orientation: positive F_x drives q_x(τ) = q0_x - F_x τ, τ = 1..T
// (see force_alpha_offset). The semiclassical drift is then
//   Δm_y = Σ_τ [v_y(q_τ) + F_x Ω(q_τ)],
// so a filled band with Chern number ν moves by F_x ν/2π per step along y.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qwalk/bloch.hpp"
#include "qwalk/lattice_walk.hpp"

namespace qw {

struct WavepacketSpec {
  Quasimomentum q0;
  Band band = Band::Upper;
  double sigma_G = 10.0;
  double delta = kPi / 2;
  bool inverse_protocol = false;  // evolve with U^{-1}; band refers to U(q)^{-1}
};

StepProtocol protocol_for(const WavepacketSpec& spec);

// N Σ_m e^{i q0·m} e^{-|m|²/σ_G²} |m> ⊗ φ_band(q0), truncated at |m| ≤ cutoff·σ_G.
WalkerState make_wavepacket(const WavepacketSpec& spec, double cutoff = 5.5);

struct LinearFit {
  double slope = 0.0, intercept = 0.0;
  double slope_err = 0.0, intercept_err = 0.0;
  double origin_slope = 0.0, origin_slope_err = 0.0;  // fit through (0, 0)
};

// Unweighted least squares; standard errors from the residual variance.
LinearFit fit_line(std::span<const double> t, std::span<const double> y);

struct ForceConfig {
  double F_x = 0.0;
  double gap0 = 0.0;  // bulk gap at quasi-energy 0 of the protocol

  double ratio() const { return gap0 > 0.0 ? F_x / gap0 : 0.0; }
  // Adiabaticity at risk when the force reaches half the gap.
  bool warning() const { return std::abs(F_x) >= 0.5 * gap0; }
};

ForceConfig make_force(double F_x, double delta);

struct Trajectory {
  std::vector<double> x, y;    // centre of mass at t = 0..T
  std::vector<double> dx, dy;  // displacement from t = 0
  LinearFit fit_x, fit_y;
  bool adiabatic_warning = false;
};

Trajectory forced_trajectory(const WavepacketSpec& spec, const ForceConfig& force, int steps);

struct VelocityFit {
  double vx = 0.0, vy = 0.0;
  double vx_err = 0.0, vy_err = 0.0;
};

VelocityFit measure_group_velocity(const WavepacketSpec& spec, int steps = 5);

struct VelocityMap {
  int n = 0;
  std::vector<Quasimomentum> q;  // row-major, q = -π + 2π i/n, i = 1..n
  std::vector<VelocityFit> measured;
  std::vector<std::array<double, 2>> analytic;
  double max_error_x = 0.0, max_error_y = 0.0;
};

VelocityMap velocity_map(double delta, Band band, int grid = 11, int steps = 5,
                         double sigma_G = 10.0);

// Grid used for filled-band averages: q = -π + 2π i/n, i = 1..n.
std::vector<Quasimomentum> band_average_grid(int n);

struct BandAverageOptions {
  int grid = 11;
  int steps = 5;
  bool combine_inverse = true;
  double sigma_G = 10.0;
};

struct BandAverage {
  double delta = 0.0;
  double F_x = 0.0;
  Band band = Band::Lower;
  std::vector<double> dx, dy;  // reported series: combined, or direct if not combining
  std::vector<double> direct_dx, direct_dy;
  std::vector<double> inverse_dx, inverse_dy;  // empty unless combining
  LinearFit fit_x, fit_y;
  double nu_fit = 0.0, nu_err = 0.0;                // affine fit
  double nu_fit_origin = 0.0, nu_err_origin = 0.0;  // fit through the origin
  bool adiabatic_warning = false;
};

BandAverage band_averaged_displacement(double delta, Band band, double F_x,
                                       const BandAverageOptions& options = {});

// Σ_{τ=1..t} v(q_τ) + F_x Ω(q_τ) ŷ evaluated as the integral over [1/2, t + 1/2]
// along q(τ) = q0 - F_x τ x̂ (Simpson, 16 panels per step).
std::array<double, 2> semiclassical_displacement(Quasimomentum q0, double delta, Band band,
                                                 double F_x, int steps);

struct MonteCarloResult {
  double mean_x = 0.0, mean_y = 0.0;
  double std_x = 0.0, std_y = 0.0;
  std::vector<std::array<double, 2>> samples;  // final centre of mass per sample
};

// Each grating of each step is displaced along its axis by N(0, (σ·Λ)²); the
// shift enters as an α0 offset. Sample k draws from its own stream seeded by
// (seed, k), so results do not depend on scheduling.
MonteCarloResult misalignment_monte_carlo(const StepProtocol& protocol, const WalkerState& input,
                                          int steps, double sigma_shift, int n_samples,
                                          std::uint64_t seed, double force = 0.0);

}  // namespace qw
