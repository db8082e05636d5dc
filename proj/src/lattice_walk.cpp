#include "qwalk/lattice_walk.hpp"

#include <algorithm>
#include <cmath>

#include "qwalk/errors.hpp"
#include "qwalk/simd/kernels.hpp"

namespace qw {
namespace {

constexpr cplx kI{0.0, 1.0};

simd::Coin2 to_coin2(const Mat2& m) { return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)}; }

// Grows the window by one site on each side of `axis` where amplitude sits on the edge.
void ensure_margin(WalkerState& s, Axis axis, bool auto_grow) {
  const Window& w = s.window();
  const int nx = w.width();
  const int ny = w.height();
  auto nonzero = [&](int x, int y) {
    const std::size_t i = 2 * s.site_index(x, y);
    return s.data()[i] != cplx{} || s.data()[i + 1] != cplx{};
  };
  bool lo = false, hi = false;
  if (axis == Axis::X) {
    for (int j = 0; j < ny && !(lo && hi); ++j) {
      lo = lo || nonzero(w.x_min, w.y_min + j);
      hi = hi || nonzero(w.x_max, w.y_min + j);
    }
  } else {
    for (int i = 0; i < nx && !(lo && hi); ++i) {
      lo = lo || nonzero(w.x_min + i, w.y_min);
      hi = hi || nonzero(w.x_min + i, w.y_max);
    }
  }
  if (!lo && !hi) return;
  if (!auto_grow) fail(ErrorKind::WindowOverflow, "amplitude reached the window edge");
  if (axis == Axis::X)
    s.grow(lo ? 1 : 0, hi ? 1 : 0, 0, 0);
  else
    s.grow(0, 0, lo ? 1 : 0, hi ? 1 : 0);
}

void apply_plate_inplace(WalkerState& s, std::vector<cplx>& scratch, const PlateDescriptor& plate,
                         double period, double alpha_offset, bool auto_grow) {
  const auto& k = simd::kernels();
  const double alpha = effective_alpha0(plate, period) + alpha_offset;
  const double c = std::cos(0.5 * plate.delta);
  const double sn = std::sin(0.5 * plate.delta);
  if (plate.kind == PlateKind::Uniform) {
    k.apply_coin(s.data(), to_coin2(lc_plate(plate.delta, alpha).matrix));
    return;
  }
  ensure_margin(s, plate.axis, auto_grow);
  const simd::ShiftCoeffs coeffs{cplx{c, 0.0}, kI * sn * std::exp(-2.0 * kI * alpha),
                                 kI * sn * std::exp(2.0 * kI * alpha)};
  const std::size_t stride =
      plate.axis == Axis::X ? 1 : static_cast<std::size_t>(s.window().width());
  scratch.resize(s.data().size());
  k.coupled_shift(scratch, s.data(), stride, coeffs);
  std::copy(scratch.begin(), scratch.end(), s.data().begin());
  ensure_margin(s, plate.axis, auto_grow);
}

}  // namespace

Window Window::around(Site centre, int half_width) {
  return {centre.x - half_width, centre.x + half_width, centre.y - half_width,
          centre.y + half_width};
}

Window Window::hull(const Window& a, const Window& b) {
  return {std::min(a.x_min, b.x_min), std::max(a.x_max, b.x_max), std::min(a.y_min, b.y_min),
          std::max(a.y_max, b.y_max)};
}

WalkerState::WalkerState(Window w) : window_(w) {
  if (w.x_max < w.x_min || w.y_max < w.y_min)
    fail(ErrorKind::InvalidArgument, "empty lattice window");
  amp_.assign(2 * w.sites(), cplx{});
}

cplx WalkerState::amplitude(int x, int y, int coin) const {
  if (!window_.contains(x, y)) return {};
  return amp_[2 * site_index(x, y) + coin];
}

Spinor WalkerState::spinor(int x, int y) const {
  return Spinor(amplitude(x, y, 0), amplitude(x, y, 1));
}

void WalkerState::set(int x, int y, int coin, cplx value) {
  if (!window_.contains(x, y) || coin < 0 || coin > 1)
    fail(ErrorKind::InvalidArgument, "site outside the lattice window");
  amp_[2 * site_index(x, y) + coin] = value;
}

double WalkerState::norm_squared() const {
  std::vector<double> p(window_.sites());
  simd::kernels().site_probabilities(amp_, p);
  double acc = 0.0;
  for (double v : p) acc += v;
  return acc;
}

void WalkerState::scale(cplx factor) {
  for (auto& a : amp_) a *= factor;
}

cplx WalkerState::inner(const WalkerState& other) const {
  if (window_.x_min == other.window_.x_min && window_.x_max == other.window_.x_max &&
      window_.y_min == other.window_.y_min && window_.y_max == other.window_.y_max)
    return simd::kernels().inner_product(amp_, other.amp_);
  const Window h = Window::hull(window_, other.window_);
  const WalkerState a = embedded(h);
  const WalkerState b = other.embedded(h);
  return simd::kernels().inner_product(a.amp_, b.amp_);
}

WalkerState WalkerState::embedded(Window target) const {
  if (target.x_min > window_.x_min || target.x_max < window_.x_max ||
      target.y_min > window_.y_min || target.y_max < window_.y_max)
    fail(ErrorKind::InvalidArgument, "target window does not contain the state");
  WalkerState out(target);
  const int nx = window_.width();
  for (int y = window_.y_min; y <= window_.y_max; ++y) {
    const auto src = amp_.begin() + 2 * site_index(window_.x_min, y);
    std::copy(src, src + 2 * nx, out.amp_.begin() + 2 * out.site_index(window_.x_min, y));
  }
  return out;
}

void WalkerState::grow(int left, int right, int down, int up) {
  if (left < 0 || right < 0 || down < 0 || up < 0)
    fail(ErrorKind::InvalidArgument, "window can only grow");
  *this = embedded({window_.x_min - left, window_.x_max + right, window_.y_min - down,
                    window_.y_max + up});
}

double WalkerState::ring_max(Axis axis) const {
  double m = 0.0;
  auto site = [&](int x, int y) {
    const std::size_t i = 2 * site_index(x, y);
    m = std::max({m, std::abs(amp_[i]), std::abs(amp_[i + 1])});
  };
  if (axis == Axis::X) {
    for (int y = window_.y_min; y <= window_.y_max; ++y) {
      site(window_.x_min, y);
      site(window_.x_max, y);
    }
  } else {
    for (int x = window_.x_min; x <= window_.x_max; ++x) {
      site(x, window_.y_min);
      site(x, window_.y_max);
    }
  }
  return m;
}

double WalkerState::ring_max() const { return std::max(ring_max(Axis::X), ring_max(Axis::Y)); }

WalkerState localized_state(Site m, const Spinor& coin) {
  if (!coin.allFinite() || std::abs(coin.squaredNorm() - 1.0) > 1e-10)
    fail(ErrorKind::InvalidArgument, "coin spinor must be normalized");
  WalkerState s(Window::around(m, 1));
  s.set(m.x, m.y, 0, coin(0));
  s.set(m.x, m.y, 1, coin(1));
  return s;
}

WalkerState apply_plate(const WalkerState& state, const PlateDescriptor& plate, double period,
                        double alpha_offset, bool auto_grow) {
  if (!(period > 0.0)) fail(ErrorKind::InvalidArgument, "grating period must be positive");
  WalkerState out = state;
  std::vector<cplx> scratch;
  apply_plate_inplace(out, scratch, plate, period, alpha_offset, auto_grow);
  return out;
}

void evolve_observed(const WalkerState& state, const StepProtocol& protocol, int steps,
                     double force, const EvolveOptions& options,
                     const std::function<void(int t, const WalkerState&)>& observer) {
  protocol.validate();
  if (steps < 0) fail(ErrorKind::InvalidArgument, "steps must be >= 0");
  if (!std::isfinite(force)) fail(ErrorKind::InvalidArgument, "force must be finite");
  WalkerState s = state;
  std::vector<cplx> scratch;
  if (observer) observer(0, s);
  for (int t = 0; t < steps; ++t) {
    const int tau = options.first_step + t;
    for (std::size_t i = 0; i < protocol.plates.size(); ++i) {
      const auto& plate = protocol.plates[i];
      double offset = 0.0;
      if (plate.kind == PlateKind::Grating && plate.axis == Axis::X)
        offset += force_alpha_offset(tau, force);
      if (options.jitter) offset += options.jitter(tau, i);
      apply_plate_inplace(s, scratch, plate, protocol.period, offset, options.auto_grow);
    }
    if (observer) observer(t + 1, s);
  }
}

WalkerState evolve(const WalkerState& state, const StepProtocol& protocol, int steps,
                   double force, const EvolveOptions& options) {
  WalkerState out = state;
  evolve_observed(state, protocol, steps, force, options, [&](int t, const WalkerState& s) {
    if (t == steps) out = s;
  });
  return out;
}

double Distribution::at(int x, int y) const {
  if (!window.contains(x, y)) return 0.0;
  return p[static_cast<std::size_t>(y - window.y_min) * window.width() + (x - window.x_min)];
}

Distribution Distribution::embedded(Window target) const {
  Distribution out;
  out.window = target;
  out.p.assign(target.sites(), 0.0);
  out.total = total;
  for (int y = window.y_min; y <= window.y_max; ++y)
    for (int x = window.x_min; x <= window.x_max; ++x) {
      if (!target.contains(x, y)) {
        if (at(x, y) != 0.0) fail(ErrorKind::InvalidArgument, "target window clips support");
        continue;
      }
      out.p[static_cast<std::size_t>(y - target.y_min) * target.width() + (x - target.x_min)] =
          at(x, y);
    }
  return out;
}

Distribution make_distribution(Window window, std::vector<double> p) {
  if (p.size() != window.sites()) fail(ErrorKind::InvalidArgument, "distribution size mismatch");
  Distribution d;
  d.window = window;
  d.total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v))
      fail(ErrorKind::InvalidArgument, "probabilities must be finite and non-negative");
    d.total += v;
  }
  d.p = std::move(p);
  return d;
}

Distribution distribution(const WalkerState& state, const std::optional<Spinor>& analyzer) {
  Distribution d;
  d.window = state.window();
  d.p.assign(d.window.sites(), 0.0);
  const auto amp = state.data();
  if (analyzer) {
    const Spinor a = analyzer->normalized();
    for (std::size_t s = 0; s < d.p.size(); ++s)
      d.p[s] = std::norm(std::conj(a(0)) * amp[2 * s] + std::conj(a(1)) * amp[2 * s + 1]);
  } else {
    simd::kernels().site_probabilities(amp, d.p);
  }
  d.total = 0.0;
  for (double v : d.p) d.total += v;
  return d;
}

double similarity(const Distribution& pe, const Distribution& ps) {
  const Window h = Window::hull(pe.window, ps.window);
  double overlap = 0.0, se = 0.0, ss = 0.0;
  for (int y = h.y_min; y <= h.y_max; ++y)
    for (int x = h.x_min; x <= h.x_max; ++x) {
      const double a = pe.at(x, y);
      const double b = ps.at(x, y);
      overlap += std::sqrt(a * b);
      se += a;
      ss += b;
    }
  if (se <= 0.0 || ss <= 0.0) fail(ErrorKind::InvalidArgument, "similarity of an empty distribution");
  return overlap * overlap / (se * ss);
}

std::pair<double, double> center_of_mass(const Distribution& d) {
  double mx = 0.0, my = 0.0, tot = 0.0;
  for (int y = d.window.y_min; y <= d.window.y_max; ++y)
    for (int x = d.window.x_min; x <= d.window.x_max; ++x) {
      const double v = d.at(x, y);
      mx += x * v;
      my += y * v;
      tot += v;
    }
  if (tot <= 0.0) return {0.0, 0.0};
  return {mx / tot, my / tot};
}

std::pair<double, double> center_of_mass(const WalkerState& state) {
  return center_of_mass(distribution(state));
}

double antidiagonal_mass(const Distribution& d) {
  double acc = 0.0;
  for (int x = d.window.x_min; x <= d.window.x_max; ++x) acc += d.at(x, -x);
  return acc;
}

}  // namespace qw
