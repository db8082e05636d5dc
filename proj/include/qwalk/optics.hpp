#pragma once

// Photonic encoding and read-out: Gaussian modes, focal-plane camera images,
// site calibration and probability extraction, and the 1D non-ideality
// path-sum. Lengths are in metres unless a name says otherwise.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qwalk/lattice_walk.hpp"

namespace qw {

struct OpticalConfig {
  double wavelength = 632.8e-9;
  double waist = 5e-3;          // w0
  double period = 5e-3;         // grating period Λ
  double focal_length = 0.5;    // f
  double plate_distance = 2e-2; // d

  void validate() const;
  double rayleigh_range() const;  // π w0² / λ
  double delta_k() const;         // 2π / Λ
  double site_pitch() const;      // f λ / Λ, camera spacing of adjacent sites
  // True when z0 exceeds the propagation length by at least a factor 10.
  bool ideal_regime(double setup_length) const;
};

struct GaussianMode {
  Site m;
  double waist = 0.0;
  double wavelength = 0.0;
  std::array<double, 2> k_perp{0.0, 0.0};

  double rayleigh_range() const;
  double radius(double z) const;     // w(z)
  double curvature(double z) const;  // R(z); infinite at z = 0
  double gouy(double z) const;       // ξ(z) = atan(z/z0)
};

GaussianMode gaussian_mode(Site m, const OpticalConfig& config);

// R = f λ k⊥ / 2π and its inverse.
std::array<double, 2> camera_position(std::array<double, 2> k_perp, const OpticalConfig& config);
std::array<double, 2> camera_position(Site m, const OpticalConfig& config);
std::array<double, 2> k_perp_from_camera(std::array<double, 2> r, const OpticalConfig& config);

// 1/e² amplitude radius of one site's focal spot, f λ / (π w0).
double spot_radius(const OpticalConfig& config);

// Envelope width σ_G equivalent to a single input beam of radius w_g: Λ/(π w_g).
double sigma_for_beam_radius(double w_g, const OpticalConfig& config);

// Crosstalk between focal spots one site apart.
struct ModeOverlap {
  double amplitude = 0.0;    // ∫ A_m A_{m+1} / ∫ A²  = exp(-a²/2w̃²)
  double power = 0.0;        // ∫ I_m I_{m+1} / ∫ I²  = exp(-a²/w̃²)
  double box_leakage = 0.0;  // power of one spot inside the neighbour's box
  // The amplitude figure is the one that reproduces the quoted ~0.8%.
  double adopted() const { return amplitude; }
};

ModeOverlap adjacent_mode_overlap(const OpticalConfig& config);

struct RasterSpec {
  int nx = 1024, ny = 1024;
  double pixel = 5e-6;
  double centre_x = 0.0, centre_y = 0.0;  // camera coordinate of the raster centre
  double tilt = 0.0;                      // lattice rotation in radians (grating tilt)
};

struct CameraImage {
  int nx = 0, ny = 0;
  double pixel = 0.0;
  double origin_x = 0.0, origin_y = 0.0;  // camera coordinate of pixel (0, 0)
  std::vector<double> data;               // row-major, row = y index
  double clipped_fraction = 0.0;          // rendered power falling outside the raster

  double x(int i) const { return origin_x + i * pixel; }
  double y(int j) const { return origin_y + j * pixel; }
  double at(int i, int j) const { return data[static_cast<std::size_t>(j) * nx + i]; }
  double total() const;
};

// Incoherent: Σ_m p(m) × unit-power spot at the site position.
CameraImage render_focal_plane(const Distribution& d, const OpticalConfig& config,
                               const RasterSpec& raster = {});
// Coherent: Σ_c |Σ_m ψ(m, c) × spot amplitude|².
CameraImage render_focal_plane(const WalkerState& psi, const OpticalConfig& config,
                               const RasterSpec& raster = {});

// 1/e² intensity diameter from the image second moments (mean of both axes).
double image_diameter(const CameraImage& image);

struct SiteGrid {
  int max_order = 0;
  std::array<double, 2> origin{0.0, 0.0};
  std::array<double, 2> a_x{0.0, 0.0}, a_y{0.0, 0.0};  // lattice vectors
  double box_half_width = 0.0;

  std::array<double, 2> position(int mx, int my) const;
};

// Grid from the lattice geometry without any fitting.
SiteGrid analytic_site_grid(const OpticalConfig& config, int max_order, double tilt = 0.0);

struct CalibrationOptions {
  RasterSpec raster;
  int fit_half_window = 0;  // pixels; 0 picks half a site pitch
};

// Renders the calibration walks U_x = T_x(π)·L(π, 0) and U_y = T_y(π)·L(π, 0) from
// |0,0,H>, which put spots at ±t along one axis, fits every spot centre with a
// 2D Gaussian and least-squares fits the lattice vectors.
SiteGrid calibrate_sites(const OpticalConfig& config, int max_order,
                         const CalibrationOptions& options = {});

// Box-integrated intensities normalized to 1, over [-max_order, max_order]².
Distribution extract_distribution(const CameraImage& image, const SiteGrid& grid);

// Fraction of the image power inside the site boxes.
double boxed_power_fraction(const CameraImage& image, const SiteGrid& grid);

// 16-bit binary PGM, big-endian, peak intensity mapped to 65535.
void write_pgm16(const std::string& path, const CameraImage& image,
                 const std::vector<std::string>& comments = {});

struct NonIdealResult {
  Distribution ideal;
  Distribution real;  // normalized
  double similarity = 1.0;
  double raw_total = 1.0;  // Σ p before normalization (visibility loss)
};

// 1D walk U = T_x·W from |0, coin>, with free propagation d between plates:
// order s picks up exp(-i 2πλd s²/Λ²) and a lateral offset dλs/Λ per gap; each
// grating sees α0 + X π/Λ for the path offset X; paths ending on the same
// (m, coin) interfere with visibility exp(-ΔX²/(2 w0²)).
NonIdealResult simulate_nonidealities_1d(double delta, int steps, const OpticalConfig& config,
                                         const Spinor& coin);

}  // namespace qw
