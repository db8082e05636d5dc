#include "qwalk/edge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <lapacke.h>

#include "qwalk/errors.hpp"
#include "qwalk/parallel.hpp"

namespace qw {
namespace {

constexpr cplx kI{0.0, 1.0};

double wrap_phase(double a) {
  a = std::remainder(a, kTwoPi);  // [-π, π]
  return a <= -kPi ? a + kTwoPi : a;
}

}  // namespace

Eigen::MatrixXcd strip_operator(double delta, double q_y, int N, StripBoundary boundary) {
  require(N >= 1, "strip half-width must be >= 1");
  require(std::isfinite(delta) && std::isfinite(q_y), "delta and q_y must be finite");
  const int sites = 2 * N + 1;
  const int dim = 2 * sites;
  const double c = std::cos(0.5 * delta);
  const double s = std::sin(0.5 * delta);
  auto idx = [N](int x, int coin) { return 2 * (x + N) + coin; };

  const Mat2 w = lc_plate(kPi / 2, 0.0).matrix;
  const Mat2 ty = g_plate_momentum(Axis::Y, delta, 0.0, q_y).matrix;
  Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::MatrixXcd Ty = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k < sites; ++k) {
    W.block<2, 2>(2 * k, 2 * k) = w;
    Ty.block<2, 2>(2 * k, 2 * k) = ty;
  }

  // x-grating couples L(x) with R(x+1); L(N) and R(-N) lose their partner.
  Eigen::MatrixXcd Tx = Eigen::MatrixXcd::Zero(dim, dim);
  const cplx up = kI * s, down = kI * s;
  for (int x = -N; x < N; ++x) {
    Tx(idx(x, 0), idx(x, 0)) = c;
    Tx(idx(x, 0), idx(x + 1, 1)) = up;
    Tx(idx(x + 1, 1), idx(x, 0)) = down;
    Tx(idx(x + 1, 1), idx(x + 1, 1)) = c;
  }
  const double lone = boundary == StripBoundary::Reflecting ? 1.0 : c;
  Tx(idx(N, 0), idx(N, 0)) = lone;
  Tx(idx(-N, 1), idx(-N, 1)) = lone;
  return Ty * Tx * W;
}

double localization_measure(double mean_abs_x, int N) {
  return std::log10(std::max(1.0 - mean_abs_x / N, 1e-12));
}

StripSpectrum strip_spectrum(double delta, int N, int q_y_count, StripBoundary boundary) {
  require(q_y_count >= 2, "need at least two q_y samples");
  StripSpectrum out;
  out.N = N;
  out.delta = delta;
  out.boundary = boundary;
  out.bulk = band_gaps(delta);
  out.q_y.resize(q_y_count);
  for (int j = 0; j < q_y_count; ++j) out.q_y[j] = -kPi + kTwoPi * j / q_y_count;
  out.states.resize(q_y_count);
  parallel_for(q_y_count, [&](std::size_t j) {
    Eigen::MatrixXcd u = strip_operator(delta, out.q_y[j], N, boundary);
    const int n = static_cast<int>(u.rows());
    Eigen::VectorXcd vals(n);
    Eigen::MatrixXcd vecs(n, n);
    const int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n,
                                   reinterpret_cast<lapack_complex_double*>(u.data()), n,
                                   reinterpret_cast<lapack_complex_double*>(vals.data()), nullptr,
                                   1, reinterpret_cast<lapack_complex_double*>(vecs.data()), n);
    if (info != 0) fail(ErrorKind::NumericalDomain, "strip eigensolver failed");
    std::vector<StripState> st(vals.size());
    for (Eigen::Index k = 0; k < vals.size(); ++k) {
      double norm = 0.0, mx = 0.0, mabs = 0.0;
      for (int x = -N; x <= N; ++x) {
        const double p = std::norm(vecs(2 * (x + N), k)) + std::norm(vecs(2 * (x + N) + 1, k));
        norm += p;
        mx += x * p;
        mabs += std::abs(x) * p;
      }
      st[k].epsilon = wrap_phase(-std::arg(vals(k)));
      st[k].mean_x = mx / norm;
      st[k].lambda = localization_measure(mabs / norm, N);
    }
    std::sort(st.begin(), st.end(),
              [](const StripState& a, const StripState& b) { return a.epsilon < b.epsilon; });
    out.states[j] = std::move(st);
  });
  return out;
}

double strip_symmetry_defect(const StripSpectrum& s) {
  double worst = 0.0;
  for (const auto& st : s.states) {
    const std::size_t n = st.size();
    for (std::size_t k = 0; k < n; ++k) {
      // ±π are the same quasi-energy.
      const double d = std::abs(wrap_phase(st[k].epsilon + st[n - 1 - k].epsilon));
      worst = std::max(worst, d);
    }
  }
  return worst;
}

int count_edge_modes(const StripSpectrum& s, GapCenter gap, Edge edge,
                     const EdgeCountOptions& options) {
  const double half = gap == GapCenter::Zero ? 0.5 * s.bulk.gap0 : 0.5 * s.bulk.gappi;
  if (2.0 * half <= 1e-3)
    fail(ErrorKind::NearCritical, "bulk gap at the requested quasi-energy is below 1e-3");
  const double centre = gap == GapCenter::Zero ? 0.0 : kPi;
  const double limit = options.window * half;
  const std::size_t nq = s.q_y.size();

  // Edge-localized states inside the window, energies measured from the gap centre.
  std::vector<std::vector<double>> sel(nq);
  for (std::size_t j = 0; j < nq; ++j)
    for (const auto& st : s.states[j]) {
      if (st.lambda >= options.lambda_edge) continue;
      if ((edge == Edge::Right) != (st.mean_x > 0.0)) continue;
      const double e = wrap_phase(st.epsilon - centre);
      if (std::abs(e) < limit) sel[j].push_back(e);
    }

  int net = 0;
  for (std::size_t j = 0; j < nq; ++j) {
    const auto& a = sel[j];
    const auto& b = sel[(j + 1) % nq];
    if (a.empty() || b.empty()) continue;
    std::vector<int> claimed(b.size(), -1);
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::size_t best = 0;
      for (std::size_t k = 1; k < b.size(); ++k)
        if (std::abs(b[k] - a[i]) < std::abs(b[best] - a[i])) best = k;
      const bool crosses = (a[i] < 0.0) != (b[best] < 0.0);
      if (!crosses) continue;
      if (claimed[best] >= 0) {
        std::ostringstream msg;
        msg << "two edge branches cross the gap centre near q_y = " << s.q_y[j]
            << "; increase q_y_count";
        fail(ErrorKind::RefineResolution, msg.str());
      }
      claimed[best] = static_cast<int>(i);
      net += a[i] < 0.0 ? 1 : -1;
    }
  }
  return net;
}

BulkEdgeReport bulk_edge_check(double delta, int N, int q_y_count, StripBoundary boundary) {
  BulkEdgeReport r;
  r.delta = delta;
  r.N = N;
  try {
    r.chern_minus = chern_number_adaptive(delta, Band::Lower).value;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NearCritical) throw;
  }
  const StripSpectrum s = strip_spectrum(delta, N, q_y_count, boundary);
  if (s.bulk.gap0 <= 1e-3 || s.bulk.gappi <= 1e-3) {
    std::ostringstream msg;
    msg << "delta = " << delta << " is near-critical (gap0 = " << s.bulk.gap0
        << ", gappi = " << s.bulk.gappi << "); closings at pi/4 and 3pi/4";
    fail(ErrorKind::NearCritical, msg.str());
  }
  r.n0_right = count_edge_modes(s, GapCenter::Zero, Edge::Right);
  r.npi_right = count_edge_modes(s, GapCenter::Pi, Edge::Right);
  r.n0_left = count_edge_modes(s, GapCenter::Zero, Edge::Left);
  r.npi_left = count_edge_modes(s, GapCenter::Pi, Edge::Left);
  r.W0 = std::abs(r.n0_right);
  r.Wpi = std::abs(r.npi_right);
  r.consistent = r.chern_minus == r.n0_right - r.npi_right && r.n0_left == -r.n0_right &&
                 r.npi_left == -r.npi_right;
  return r;
}

}  // namespace qw
