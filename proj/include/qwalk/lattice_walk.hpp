#pragma once

// Position-space evolution of the walker on the 2D lattice.
//
// Amplitudes live on a rectangular window, stored row by row ([m_y][m_x][coin],
// coin innermost). The window always keeps a zero outer ring: before and
// after every grating it is grown by one site on any side where amplitude
// reached the edge, so a step never loses probability.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/coin_ops.hpp"

namespace qw {

struct Site {
  int x = 0;
  int y = 0;
};

struct Window {
  int x_min = 0, x_max = 0, y_min = 0, y_max = 0;

  int width() const { return x_max - x_min + 1; }
  int height() const { return y_max - y_min + 1; }
  std::size_t sites() const { return static_cast<std::size_t>(width()) * height(); }
  bool contains(int x, int y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
  static Window around(Site centre, int half_width);
  static Window hull(const Window& a, const Window& b);
};

class WalkerState {
 public:
  WalkerState() : WalkerState(Window{}) {}
  explicit WalkerState(Window w);

  const Window& window() const { return window_; }
  std::size_t site_index(int x, int y) const {
    return static_cast<std::size_t>(y - window_.y_min) * window_.width() + (x - window_.x_min);
  }

  // Zero outside the window.
  cplx amplitude(int x, int y, int coin) const;
  Spinor spinor(int x, int y) const;
  // Writes inside the window only; throws invalid-argument otherwise.
  void set(int x, int y, int coin, cplx value);

  std::span<cplx> data() { return amp_; }
  std::span<const cplx> data() const { return amp_; }

  double norm_squared() const;
  void scale(cplx factor);
  // <this|other> over the union of both windows.
  cplx inner(const WalkerState& other) const;

  // Copy into a larger window (must contain the current one).
  WalkerState embedded(Window target) const;
  void grow(int left, int right, int down, int up);

  // Largest |amplitude| on the outermost columns (Axis::X) or rows (Axis::Y).
  double ring_max(Axis axis) const;
  double ring_max() const;

 private:
  Window window_;
  std::vector<cplx> amp_;
};

// Single-site state |m, coin>. The coin must be normalized to 1e-10.
WalkerState localized_state(Site m, const Spinor& coin);

// Extra α0 for plate `plate_index` of step `step` (misalignment injection).
using AlphaJitter = std::function<double(int step, std::size_t plate_index)>;

struct EvolveOptions {
  bool auto_grow = true;
  int first_step = 1;  // time index τ of the first applied step
  AlphaJitter jitter;  // optional
};

// One plate. `alpha_offset` is added to the plate's effective α0.
WalkerState apply_plate(const WalkerState& state, const PlateDescriptor& plate, double period,
                        double alpha_offset = 0.0, bool auto_grow = true);

// |psi(t)> = U_t ... U_1 |psi>, with the x-gratings of step τ at α0 + τF/2.
WalkerState evolve(const WalkerState& state, const StepProtocol& protocol, int steps,
                   double force = 0.0, const EvolveOptions& options = {});

// Same as evolve, reporting the state after every step (t = 0 .. steps).
void evolve_observed(const WalkerState& state, const StepProtocol& protocol, int steps,
                     double force, const EvolveOptions& options,
                     const std::function<void(int t, const WalkerState&)>& observer);

struct Distribution {
  Window window;
  std::vector<double> p;  // same site order as WalkerState
  double total = 0.0;

  double at(int x, int y) const;
  Distribution embedded(Window target) const;
};

// p(m) = sum_c |psi(m, c)|^2, or |<a|psi(m)>|^2 with an analyzer polarization.
Distribution distribution(const WalkerState& state,
                          const std::optional<Spinor>& analyzer = std::nullopt);

Distribution make_distribution(Window window, std::vector<double> p);

// S = (sum sqrt(Pe Ps))^2 / (sum Pe * sum Ps)
double similarity(const Distribution& pe, const Distribution& ps);

std::pair<double, double> center_of_mass(const Distribution& d);
std::pair<double, double> center_of_mass(const WalkerState& state);

// sum of p over the anti-diagonal m_x = -m_y
double antidiagonal_mass(const Distribution& d);

}  // namespace qw
