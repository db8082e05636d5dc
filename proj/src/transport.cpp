#include "qwalk/transport.hpp"

#include <cmath>
#include <random>

#include "qwalk/errors.hpp"
#include "qwalk/parallel.hpp"

namespace qw {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

void check_spec(const WavepacketSpec& s) {
  require(std::isfinite(s.q0.x) && std::isfinite(s.q0.y), "q0 must be finite");
  require(std::isfinite(s.delta), "delta must be finite");
  require(s.sigma_G > 0.0 && std::isfinite(s.sigma_G), "sigma_G must be positive");
}

struct Series {
  std::vector<double> dx, dy;
};

Series displacement_series(const WavepacketSpec& spec, double force, int steps) {
  const WalkerState psi = make_wavepacket(spec);
  Series out;
  double x0 = 0.0, y0 = 0.0;
  evolve_observed(psi, protocol_for(spec), steps, force, {}, [&](int t, const WalkerState& s) {
    const auto [x, y] = center_of_mass(s);
    if (t == 0) x0 = x, y0 = y;
    out.dx.push_back(x - x0);
    out.dy.push_back(y - y0);
  });
  return out;
}

std::vector<double> time_axis(int steps) {
  std::vector<double> t(steps + 1);
  for (int i = 0; i <= steps; ++i) t[i] = i;
  return t;
}

}  // namespace

StepProtocol protocol_for(const WavepacketSpec& spec) {
  return spec.inverse_protocol ? protocol_U_inverse(spec.delta) : protocol_U(spec.delta);
}

WalkerState make_wavepacket(const WavepacketSpec& spec, double cutoff) {
  check_spec(spec);
  require(cutoff > 0.0, "cutoff must be positive");
  // The physical inverse protocol equals -U(q)^{-1}; that sign would swap the
  // principal-branch band labels, so inverse bands are taken from U(q)^† itself.
  const Mat2 u = step_matrix(protocol_U(spec.delta), spec.q0).matrix;
  const BlochSample b = bloch_from_unitary(spec.inverse_protocol ? Mat2(u.adjoint()) : u, spec.q0);
  const Spinor phi = b.eigenspinor(spec.band);
  const int r = static_cast<int>(std::ceil(cutoff * spec.sigma_G));
  // One spare ring so the first grating does not need to grow the window.
  WalkerState s(Window::around({0, 0}, r + 1));
  const double s2 = spec.sigma_G * spec.sigma_G;
  const double r2 = (cutoff * spec.sigma_G) * (cutoff * spec.sigma_G);
  for (int y = -r; y <= r; ++y)
    for (int x = -r; x <= r; ++x) {
      const double m2 = double(x) * x + double(y) * y;
      if (m2 > r2) continue;
      const cplx w = std::exp(cplx{-m2 / s2, spec.q0.x * x + spec.q0.y * y});
      s.set(x, y, 0, w * phi(0));
      s.set(x, y, 1, w * phi(1));
    }
  s.scale(1.0 / std::sqrt(s.norm_squared()));
  return s;
}

LinearFit fit_line(std::span<const double> t, std::span<const double> y) {
  require(t.size() == y.size() && t.size() >= 2, "fit needs at least two points");
  const double n = double(t.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  const double den = n * stt - st * st;
  require(den != 0.0, "degenerate abscissae");
  LinearFit f;
  f.slope = (n * sty - st * sy) / den;
  f.intercept = (sy - f.slope * st) / n;
  f.origin_slope = stt > 0.0 ? sty / stt : 0.0;
  double rss = 0, rss0 = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double e = y[i] - f.intercept - f.slope * t[i];
    const double e0 = y[i] - f.origin_slope * t[i];
    rss += e * e;
    rss0 += e0 * e0;
  }
  if (t.size() > 2) {
    const double s2 = rss / (n - 2);
    f.slope_err = std::sqrt(s2 * n / den);
    f.intercept_err = std::sqrt(s2 * stt / den);
  }
  if (stt > 0.0) f.origin_slope_err = std::sqrt(rss0 / (n - 1) / stt);
  return f;
}

ForceConfig make_force(double F_x, double delta) {
  require(std::isfinite(F_x), "force must be finite");
  return {F_x, band_gaps(delta).gap0};
}

Trajectory forced_trajectory(const WavepacketSpec& spec, const ForceConfig& force, int steps) {
  require(steps >= 0, "steps must be >= 0");
  const WalkerState psi = make_wavepacket(spec);
  Trajectory tr;
  tr.adiabatic_warning = force.warning();
  evolve_observed(psi, protocol_for(spec), steps, force.F_x, {},
                  [&](int, const WalkerState& s) {
                    const auto [x, y] = center_of_mass(s);
                    tr.x.push_back(x);
                    tr.y.push_back(y);
                    tr.dx.push_back(x - tr.x.front());
                    tr.dy.push_back(y - tr.y.front());
                  });
  if (steps >= 1) {
    const auto t = time_axis(steps);
    tr.fit_x = fit_line(t, tr.dx);
    tr.fit_y = fit_line(t, tr.dy);
  }
  return tr;
}

VelocityFit measure_group_velocity(const WavepacketSpec& spec, int steps) {
  require(steps >= 2, "group velocity fit needs at least 2 steps");
  const Trajectory tr = forced_trajectory(spec, ForceConfig{}, steps);
  return {tr.fit_x.slope, tr.fit_y.slope, tr.fit_x.slope_err, tr.fit_y.slope_err};
}

std::vector<Quasimomentum> band_average_grid(int n) {
  require(n >= 1, "grid must be positive");
  std::vector<Quasimomentum> q;
  q.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 1; j <= n; ++j)
    for (int i = 1; i <= n; ++i) q.push_back({-kPi + kTwoPi * i / n, -kPi + kTwoPi * j / n});
  return q;
}

VelocityMap velocity_map(double delta, Band band, int grid, int steps, double sigma_G) {
  VelocityMap m;
  m.n = grid;
  m.q = band_average_grid(grid);
  m.measured.resize(m.q.size());
  m.analytic.resize(m.q.size());
  parallel_for(m.q.size(), [&](std::size_t k) {
    const WavepacketSpec spec{m.q[k], band, sigma_G, delta, false};
    m.measured[k] = measure_group_velocity(spec, steps);
    m.analytic[k] = group_velocity(m.q[k], delta, band);
  });
  for (std::size_t k = 0; k < m.q.size(); ++k) {
    m.max_error_x = std::max(m.max_error_x, std::abs(m.measured[k].vx - m.analytic[k][0]));
    m.max_error_y = std::max(m.max_error_y, std::abs(m.measured[k].vy - m.analytic[k][1]));
  }
  return m;
}

BandAverage band_averaged_displacement(double delta, Band band, double F_x,
                                       const BandAverageOptions& options) {
  require(options.steps >= 1, "steps must be >= 1");
  require(std::isfinite(F_x), "force must be finite");
  const auto grid = band_average_grid(options.grid);
  const int passes = options.combine_inverse ? 2 : 1;
  std::vector<Series> runs(grid.size() * passes);
  parallel_for(runs.size(), [&](std::size_t k) {
    const WavepacketSpec spec{grid[k % grid.size()], band, options.sigma_G, delta,
                              k >= grid.size()};
    runs[k] = displacement_series(spec, F_x, options.steps);
  });

  const std::size_t len = options.steps + 1;
  auto average = [&](std::size_t first, std::vector<double>& ax, std::vector<double>& ay) {
    ax.assign(len, 0.0);
    ay.assign(len, 0.0);
    for (std::size_t k = first; k < first + grid.size(); ++k)
      for (std::size_t t = 0; t < len; ++t) {
        ax[t] += runs[k].dx[t];
        ay[t] += runs[k].dy[t];
      }
    for (std::size_t t = 0; t < len; ++t) {
      ax[t] /= double(grid.size());
      ay[t] /= double(grid.size());
    }
  };

  BandAverage out;
  out.delta = delta;
  out.F_x = F_x;
  out.band = band;
  out.adiabatic_warning = make_force(F_x, delta).warning();
  average(0, out.direct_dx, out.direct_dy);
  if (options.combine_inverse) {
    average(grid.size(), out.inverse_dx, out.inverse_dy);
    out.dx.resize(len);
    out.dy.resize(len);
    for (std::size_t t = 0; t < len; ++t) {
      out.dx[t] = 0.5 * (out.direct_dx[t] - out.inverse_dx[t]);
      out.dy[t] = 0.5 * (out.direct_dy[t] - out.inverse_dy[t]);
    }
  } else {
    out.dx = out.direct_dx;
    out.dy = out.direct_dy;
  }
  const auto t = time_axis(options.steps);
  out.fit_x = fit_line(t, out.dx);
  out.fit_y = fit_line(t, out.dy);
  if (F_x != 0.0) {
    const double k = kTwoPi / F_x;
    out.nu_fit = k * out.fit_y.slope;
    out.nu_err = std::abs(k) * out.fit_y.slope_err;
    out.nu_fit_origin = k * out.fit_y.origin_slope;
    out.nu_err_origin = std::abs(k) * out.fit_y.origin_slope_err;
  }
  return out;
}

std::array<double, 2> semiclassical_displacement(Quasimomentum q0, double delta, Band band,
                                                 double F_x, int steps) {
  require(steps >= 0, "steps must be >= 0");
  const StepProtocol p = protocol_U(delta);
  auto rate = [&](double tau) -> std::array<double, 2> {
    const Quasimomentum q{q0.x - F_x * tau, q0.y};
    const auto v = group_velocity(p, q, band);
    return {v[0], v[1] + F_x * berry_curvature(p, q, band)};
  };
  const int panels = 16 * steps;
  std::array<double, 2> acc{0.0, 0.0};
  if (steps == 0) return acc;
  const double a = 0.5, h = double(steps) / panels;
  for (int i = 0; i <= panels; ++i) {
    const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const auto r = rate(a + i * h);
    acc[0] += w * r[0];
    acc[1] += w * r[1];
  }
  acc[0] *= h / 3.0;
  acc[1] *= h / 3.0;
  return acc;
}

MonteCarloResult misalignment_monte_carlo(const StepProtocol& protocol, const WalkerState& input,
                                          int steps, double sigma_shift, int n_samples,
                                          std::uint64_t seed, double force) {
  protocol.validate();
  require(n_samples >= 2, "n_samples must be >= 2");
  require(steps >= 0, "steps must be >= 0");
  require(sigma_shift >= 0.0 && std::isfinite(sigma_shift), "sigma_shift must be >= 0");
  const std::size_t n_plates = protocol.plates.size();
  MonteCarloResult out;
  out.samples.resize(n_samples);
  parallel_for(n_samples, [&](std::size_t k) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(k)));
    std::normal_distribution<double> gauss(0.0, sigma_shift);
    // Offsets in units of Λ for every (step, plate); α0 shifts by -π·Δx/Λ.
    std::vector<double> alpha(static_cast<std::size_t>(steps) * n_plates, 0.0);
    for (auto& a : alpha) a = sigma_shift > 0.0 ? -kPi * gauss(rng) : 0.0;
    EvolveOptions opt;
    opt.jitter = [&](int tau, std::size_t i) {
      if (protocol.plates[i].kind != PlateKind::Grating) return 0.0;
      return alpha[static_cast<std::size_t>(tau - 1) * n_plates + i];
    };
    const auto [x, y] = center_of_mass(evolve(input, protocol, steps, force, opt));
    out.samples[k] = {x, y};
  });
  for (const auto& s : out.samples) {
    out.mean_x += s[0];
    out.mean_y += s[1];
  }
  out.mean_x /= n_samples;
  out.mean_y /= n_samples;
  for (const auto& s : out.samples) {
    out.std_x += (s[0] - out.mean_x) * (s[0] - out.mean_x);
    out.std_y += (s[1] - out.mean_y) * (s[1] - out.mean_y);
  }
  out.std_x = std::sqrt(out.std_x / (n_samples - 1));
  out.std_y = std::sqrt(out.std_y / (n_samples - 1));
  return out;
}

}  // namespace qw
