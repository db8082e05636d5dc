#include "qwalk/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "qwalk/errors.hpp"
#include "qwalk/parallel.hpp"

namespace qw {
namespace {

constexpr double kFdStep = 1e-5;
constexpr double kDegenerate = 1e-8;
constexpr double kNearCritical = 1e-6;

struct Pauli {
  double cos_eps;
  Eigen::Vector3d v;  // sin ε · n
};

// U = cos ε - i sin ε n·σ  =>  i(U - U†)/2 = sin ε n·σ.
Pauli pauli_parts(const Mat2& u) {
  const double det_err = std::abs(u.determinant() - cplx{1.0, 0.0});
  if (det_err > 1e-9) fail(ErrorKind::NumericalDomain, "step matrix is not in SU(2)");
  const Mat2 p = cplx{0.0, 0.5} * (u - u.adjoint());
  return {0.5 * u.trace().real(), Eigen::Vector3d(p(0, 1).real(), -p(0, 1).imag(), p(0, 0).real())};
}

// +1 eigenspinor of n·σ with a fixed gauge (largest component real positive).
Spinor plus_spinor(const Eigen::Vector3d& n) {
  Spinor v;
  if (n.z() >= 0.0) {
    v << cplx{1.0 + n.z(), 0.0}, cplx{n.x(), n.y()};
  } else {
    v << cplx{n.x(), -n.y()}, cplx{1.0 - n.z(), 0.0};
  }
  return v.normalized();
}

Eigen::Vector3d n_vector(const StepProtocol& protocol, Quasimomentum q) {
  return bloch_sample(protocol, q).n;
}

cplx link(const Spinor& a, const Spinor& b) {
  const cplx z = a.dot(b);  // conj(a)·b
  const double m = std::abs(z);
  if (m < 1e-14) fail(ErrorKind::NearCritical, "vanishing link overlap on the Chern grid");
  return z / m;
}

double band_edge_gap(double eps) { return std::min(2.0 * eps, 2.0 * (kPi - eps)); }

// Minimizes f by compass search starting at q0 with initial step h.
Quasimomentum pattern_search(const std::function<double(Quasimomentum)>& f, Quasimomentum q0,
                             double h) {
  Quasimomentum best = q0;
  double fbest = f(best);
  static constexpr int dirs[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1},
                                     {1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
  while (h > 1e-12) {
    bool moved = false;
    for (const auto& d : dirs) {
      const Quasimomentum c{best.x + d[0] * h, best.y + d[1] * h};
      const double fc = f(c);
      if (fc < fbest) {
        fbest = fc;
        best = c;
        moved = true;
        break;
      }
    }
    if (!moved) h *= 0.5;
  }
  return best;
}

BandGaps gaps_of(const std::function<double(Quasimomentum)>& eps, int grid_n) {
  if (grid_n < 2) fail(ErrorKind::InvalidArgument, "grid_n must be >= 2");
  double emin = std::numeric_limits<double>::infinity();
  double emax = -emin;
  Quasimomentum qmin, qmax;
  for (int j = 0; j < grid_n; ++j)
    for (int i = 0; i < grid_n; ++i) {
      const Quasimomentum q{grid_coordinate(i, grid_n), grid_coordinate(j, grid_n)};
      const double e = eps(q);
      if (e < emin) emin = e, qmin = q;
      if (e > emax) emax = e, qmax = q;
    }
  const double h = kTwoPi / grid_n;
  qmin = pattern_search(eps, qmin, h);
  qmax = pattern_search([&](Quasimomentum q) { return -eps(q); }, qmax, h);
  BandGaps g;
  g.gap0 = 2.0 * eps(qmin);
  g.gappi = 2.0 * (kPi - eps(qmax));
  g.q_min = qmin;
  g.q_max = qmax;
  return g;
}

double closed_form_eps(Quasimomentum q, double delta) {
  return std::acos(std::clamp(cos_quasi_energy(q, delta), -1.0, 1.0));
}

}  // namespace

double grid_coordinate(int i, int n) { return -kPi + kTwoPi * i / n; }

double cos_quasi_energy(Quasimomentum q, double delta) {
  const double a = std::cos(0.5 * delta);
  const double b = std::sin(0.5 * delta);
  return (a * a - a * b * (std::cos(q.x) + std::cos(q.y)) - b * b * std::cos(q.x - q.y)) *
         M_SQRT1_2;
}

double quasi_energy(Quasimomentum q, double delta) {
  if (!std::isfinite(q.x) || !std::isfinite(q.y) || !std::isfinite(delta))
    fail(ErrorKind::InvalidArgument, "non-finite quasi-momentum or retardation");
  const double c = cos_quasi_energy(q, delta);
  if (std::abs(c) > 1.0 + 1e-9) fail(ErrorKind::NumericalDomain, "|cos ε| exceeds 1");
  return std::acos(std::clamp(c, -1.0, 1.0));
}

double quasi_energy(const StepProtocol& protocol, Quasimomentum q) {
  const Pauli p = pauli_parts(step_matrix(protocol, q).matrix);
  return std::atan2(p.v.norm(), p.cos_eps);
}

BlochSample bloch_from_unitary(const Mat2& u, Quasimomentum q) {
  const Pauli p = pauli_parts(u);
  const double s = p.v.norm();
  if (s < kDegenerate) fail(ErrorKind::DegeneratePoint, "gap closes at this quasi-momentum");
  BlochSample b;
  b.q = q;
  b.epsilon = std::atan2(s, p.cos_eps);
  b.n = p.v / s;
  b.phi_plus = plus_spinor(b.n);
  b.phi_minus << -std::conj(b.phi_plus(1)), std::conj(b.phi_plus(0));
  return b;
}

BlochSample bloch_sample(const StepProtocol& protocol, Quasimomentum q) {
  return bloch_from_unitary(step_matrix(protocol, q).matrix, q);
}

BlochSample bloch_hamiltonian(Quasimomentum q, double delta) {
  return bloch_sample(protocol_U(delta), q);
}

Mat2 unitary_from_bloch(double epsilon, const Eigen::Vector3d& n) {
  Mat2 ns;
  ns << cplx{n.z(), 0.0}, cplx{n.x(), -n.y()}, cplx{n.x(), n.y()}, cplx{-n.z(), 0.0};
  return std::cos(epsilon) * Mat2::Identity() - cplx{0.0, std::sin(epsilon)} * ns;
}

std::array<double, 2> group_velocity(const StepProtocol& protocol, Quasimomentum q, Band band) {
  auto eps = [&](double dx, double dy) {
    const BlochSample b = bloch_sample(protocol, {q.x + dx, q.y + dy});
    return b.epsilon;
  };
  const double h = kFdStep;
  const double s = sign(band);
  return {s * (eps(h, 0) - eps(-h, 0)) / (2 * h), s * (eps(0, h) - eps(0, -h)) / (2 * h)};
}

std::array<double, 2> group_velocity(Quasimomentum q, double delta, Band band) {
  return group_velocity(protocol_U(delta), q, band);
}

double berry_curvature(const StepProtocol& protocol, Quasimomentum q, Band band) {
  const double h = kFdStep;
  const Eigen::Vector3d n = n_vector(protocol, q);
  const Eigen::Vector3d dx =
      (n_vector(protocol, {q.x + h, q.y}) - n_vector(protocol, {q.x - h, q.y})) / (2 * h);
  const Eigen::Vector3d dy =
      (n_vector(protocol, {q.x, q.y + h}) - n_vector(protocol, {q.x, q.y - h})) / (2 * h);
  return 0.5 * sign(band) * n.dot(dx.cross(dy));
}

double berry_curvature(Quasimomentum q, double delta, Band band) {
  return berry_curvature(protocol_U(delta), q, band);
}

double berry_curvature_eigenstate(const StepProtocol& protocol, Quasimomentum q, Band band,
                                  double h) {
  const double r = 0.5 * h;
  auto phi = [&](double dx, double dy) {
    return bloch_sample(protocol, {q.x + dx, q.y + dy}).eigenspinor(band);
  };
  const Spinor a = phi(-r, -r), b = phi(r, -r), c = phi(r, r), d = phi(-r, r);
  const cplx loop = link(a, b) * link(b, c) * link(c, d) * link(d, a);
  return std::arg(loop) / (h * h);
}

ChernResult chern_number(const StepProtocol& protocol, Band band, int grid_n) {
  if (grid_n < 4) fail(ErrorKind::InvalidArgument, "Chern grid must be at least 4x4");
  const int n = grid_n;
  std::vector<Spinor> phi(static_cast<std::size_t>(n) * n);
  double min_gap = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Quasimomentum q{grid_coordinate(i, n), grid_coordinate(j, n)};
      const Pauli p = pauli_parts(step_matrix(protocol, q).matrix);
      const double eps = std::atan2(p.v.norm(), p.cos_eps);
      min_gap = std::min(min_gap, band_edge_gap(eps));
      if (min_gap < kNearCritical)
        fail(ErrorKind::NearCritical, "band gap below 1e-6 on the Chern grid; refine delta");
      const Spinor plus = plus_spinor(p.v / p.v.norm());
      if (band == Band::Upper)
        phi[j * n + i] = plus;
      else
        phi[j * n + i] << -std::conj(plus(1)), std::conj(plus(0));
    }
  auto at = [&](int i, int j) -> const Spinor& { return phi[((j + n) % n) * n + (i + n) % n]; };
  ChernResult r;
  r.grid_n = n;
  r.min_gap = min_gap;
  double sum = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const cplx loop = link(at(i, j), at(i + 1, j)) * link(at(i + 1, j), at(i + 1, j + 1)) *
                        link(at(i + 1, j + 1), at(i, j + 1)) * link(at(i, j + 1), at(i, j));
      const double f = std::arg(loop);
      r.max_flux = std::max(r.max_flux, std::abs(f));
      sum += f;
    }
  r.raw = sum / kTwoPi;
  r.value = static_cast<int>(std::lround(r.raw));
  if (std::abs(r.raw - r.value) > 1e-6)
    fail(ErrorKind::NumericalDomain, "plaquette sum is not an integer");
  return r;
}

ChernResult chern_number(double delta, Band band, int grid_n) {
  return chern_number(protocol_U(delta), band, grid_n);
}

ChernResult chern_number_adaptive(double delta, Band band, int grid_n, int max_grid_n) {
  const StepProtocol p = protocol_U(delta);
  ChernResult r = chern_number(p, band, grid_n);
  while (r.max_flux > 0.5 * kPi && 2 * r.grid_n <= max_grid_n)
    r = chern_number(p, band, 2 * r.grid_n);
  return r;
}

double curvature_integral(const StepProtocol& protocol, Band band, int grid_n) {
  if (grid_n < 2) fail(ErrorKind::InvalidArgument, "grid_n must be >= 2");
  const int n = grid_n;
  std::vector<double> rows(n, 0.0);
  parallel_for(n, [&](std::size_t j) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      acc += berry_curvature(protocol, {grid_coordinate(i, n), grid_coordinate(int(j), n)}, band);
    rows[j] = acc;
  });
  double total = 0.0;
  for (double v : rows) total += v;
  const double dq = kTwoPi / n;
  return total * dq * dq / kTwoPi;
}

BandGaps band_gaps(double delta, int grid_n) {
  return gaps_of([delta](Quasimomentum q) { return closed_form_eps(q, delta); }, grid_n);
}

BandGaps band_gaps(const StepProtocol& protocol, int grid_n) {
  return gaps_of([&](Quasimomentum q) { return quasi_energy(protocol, q); }, grid_n);
}

BZGrid bz_grid(double delta, int n_x, int n_y) {
  if (n_x < 2 || n_y < 2) fail(ErrorKind::InvalidArgument, "grid must be at least 2x2");
  const StepProtocol p = protocol_U(delta);
  BZGrid g;
  g.n_x = n_x;
  g.n_y = n_y;
  g.delta = delta;
  g.samples.resize(static_cast<std::size_t>(n_x) * n_y);
  parallel_for(n_y, [&](std::size_t j) {
    for (int i = 0; i < n_x; ++i) {
      const Quasimomentum q{grid_coordinate(i, n_x), grid_coordinate(int(j), n_y)};
      BlochSample s = bloch_sample(p, q);
      s.omega = berry_curvature(p, q, Band::Lower);
      g.samples[j * n_x + i] = s;
    }
  });
  return g;
}

namespace {

// Golden-section minimum of f on [a, b].
std::pair<double, double> golden_min(const std::function<double(double)>& f, double a, double b,
                                     double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a), fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace

PhaseDiagram phase_diagram(const std::vector<double>& deltas, double bracket_tol) {
  PhaseDiagram out;
  out.rows.resize(deltas.size());
  parallel_for(deltas.size(), [&](std::size_t k) {
    PhaseRow& row = out.rows[k];
    row.delta = deltas[k];
    const BandGaps g = band_gaps(row.delta);
    row.gap0 = g.gap0;
    row.gappi = g.gappi;
    try {
      row.chern_minus = chern_number_adaptive(row.delta, Band::Lower).value;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NearCritical) throw;
      row.note = "near-critical";
    }
  });
  for (std::size_t k = 0; k + 1 < out.rows.size(); ++k) {
    const PhaseRow& a = out.rows[k];
    const PhaseRow& b = out.rows[k + 1];
    if (a.chern_minus && b.chern_minus && *a.chern_minus == *b.chern_minus) continue;
    const double lo = std::min(a.delta, b.delta), hi = std::max(a.delta, b.delta);
    for (char which : {'0', 'p'}) {
      auto gap = [which](double d) {
        const BandGaps g = band_gaps(d);
        return which == '0' ? g.gap0 : g.gappi;
      };
      const auto [x, fx] = golden_min(gap, lo, hi, bracket_tol);
      // A closing shows up as a gap minimum far below the gaps at both ends.
      if (fx < 1e-2 * std::min(gap(lo), gap(hi)) || fx < 1e-4)
        out.transitions.push_back({x, x - bracket_tol, x + bracket_tol, which, fx});
    }
  }
  return out;
}

}  // namespace qw
