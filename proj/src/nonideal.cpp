// 1D walk with free propagation between plates.
//
// Branches are merged exactly: two coin histories that reach the same site
// and coin with the same accumulated order sum S = Σ s (summed over the gaps
// crossed so far) also share the lateral offset dλS/Λ and thus every later
// plate factor, so they can be added coherently. Only branches with different
// S interfere with reduced visibility.

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "qwalk/errors.hpp"
#include "qwalk/optics.hpp"

namespace qw {
namespace {

constexpr int kMaxSteps = 14;

struct Key {
  int m, coin, S;
  bool operator<(const Key& o) const { return std::tie(m, coin, S) < std::tie(o.m, o.coin, o.S); }
};

using Branches = std::map<Key, cplx>;

// Partial-overlap visibility between beams displaced by dx. Amplitude overlap
// of two Gaussians exp(-r²/w0²) offset by dx.
double visibility(double dx, double w0) { return std::exp(-dx * dx / (2.0 * w0 * w0)); }

Branches apply_uniform(const Branches& in, const Mat2& u) {
  Branches out;
  for (const auto& [k, a] : in)
    for (int c = 0; c < 2; ++c) {
      const cplx v = u(c, k.coin) * a;
      if (v != cplx{}) out[{k.m, c, k.S}] += v;
    }
  return out;
}

// T_x with the optic axis each branch sees at its own lateral offset.
Branches apply_grating(const Branches& in, double delta, double alpha0, double offset_per_S,
                       double period) {
  const double c = std::cos(0.5 * delta), s = std::sin(0.5 * delta);
  const cplx i{0.0, 1.0};
  Branches out;
  for (const auto& [k, a] : in) {
    const double alpha = alpha0 + k.S * offset_per_S * kPi / period;
    if (c != 0.0) out[k] += c * a;
    if (s == 0.0) continue;
    if (k.coin == 0)
      out[{k.m + 1, 1, k.S}] += i * s * std::exp(2.0 * i * alpha) * a;
    else
      out[{k.m - 1, 0, k.S}] += i * s * std::exp(-2.0 * i * alpha) * a;
  }
  return out;
}

// Gap of length d: order s = m picks up exp(-iΔφ) and moves by dλs/Λ.
Branches propagate(const Branches& in, double phase_per_s2) {
  Branches out;
  for (const auto& [k, a] : in) {
    const double phi = phase_per_s2 * k.m * k.m;
    out[{k.m, k.coin, k.S + k.m}] += std::polar(1.0, -phi) * a;
  }
  return out;
}

Branches run(double delta, int steps, const OpticalConfig& cfg, const Spinor& coin, double d) {
  const double lam = cfg.wavelength, L = cfg.period;
  const double phase_per_s2 = kTwoPi * lam * d / (L * L);
  const double offset_per_S = d * lam / L;
  const Mat2 w = lc_plate(kPi / 2, 0.0).matrix;

  Branches b;
  for (int c = 0; c < 2; ++c)
    if (coin(c) != cplx{}) b[{0, c, 0}] = coin(c);
  const int plates = 2 * steps;
  for (int p = 0; p < plates; ++p) {
    if (p % 2 == 0)
      b = apply_uniform(b, w);
    else
      b = apply_grating(b, delta, 0.0, offset_per_S, L);
    if (p + 1 < plates && d > 0.0) b = propagate(b, phase_per_s2);
  }
  return b;
}

Distribution detect(const Branches& b, int steps, double offset_per_S, double w0, double& raw) {
  const Window win{-steps - 1, steps + 1, 0, 0};
  std::vector<double> p(win.sites(), 0.0);
  // Group by (m, coin); map order keeps groups contiguous and sorted in S.
  raw = 0.0;
  for (auto it = b.begin(); it != b.end();) {
    auto end = it;
    while (end != b.end() && end->first.m == it->first.m && end->first.coin == it->first.coin)
      ++end;
    double sum = 0.0;
    for (auto x = it; x != end; ++x) {
      sum += std::norm(x->second);
      for (auto y = std::next(x); y != end; ++y) {
        const double dx = (x->first.S - y->first.S) * offset_per_S;
        sum += 2.0 * visibility(dx, w0) * std::real(x->second * std::conj(y->second));
      }
    }
    sum = std::max(sum, 0.0);  // rounding on fully destructive sites
    p[static_cast<std::size_t>(it->first.m - win.x_min)] += sum;
    raw += sum;
    it = end;
  }
  return make_distribution(win, std::move(p));
}

}  // namespace

NonIdealResult simulate_nonidealities_1d(double delta, int steps, const OpticalConfig& config,
                                         const Spinor& coin) {
  config.validate();
  require(steps >= 0, "steps must be non-negative");
  if (steps > kMaxSteps)
    fail(ErrorKind::CombinatorialLimit,
         "non-ideality path-sum supports at most " + std::to_string(kMaxSteps) + " steps");
  require(std::abs(coin.squaredNorm() - 1.0) <= 1e-10, "input coin must be normalized");

  NonIdealResult r;
  double raw_ideal = 0.0;
  r.ideal = detect(run(delta, steps, config, coin, 0.0), steps, 0.0, config.waist, raw_ideal);
  const double offset = config.plate_distance * config.wavelength / config.period;
  r.real = detect(run(delta, steps, config, coin, config.plate_distance), steps, offset,
                  config.waist, r.raw_total);
  if (r.raw_total > 0.0)
    for (double& v : r.real.p) v /= r.raw_total;
  r.real.total = 1.0;
  r.similarity = similarity(r.ideal, r.real);
  return r;
}

}  // namespace qw
