#include <doctest.h>

#include <vector>

#include "qwalk/errors.hpp"
#include "qwalk/optics.hpp"

using namespace qw;

namespace {

// Every coin history kept separately: no merging, pairwise visibility at the end.
struct Path {
  int m, coin, S;
  cplx a;
};

Distribution brute_force(double delta, int steps, const OpticalConfig& cfg, const Spinor& in) {
  const double lam = cfg.wavelength, L = cfg.period, d = cfg.plate_distance;
  const double off = d * lam / L;
  const Mat2 w = lc_plate(kPi / 2, 0.0).matrix;
  const double c = std::cos(delta / 2), s = std::sin(delta / 2);
  const cplx i{0, 1};
  std::vector<Path> paths{{0, 0, 0, in(0)}, {0, 1, 0, in(1)}};
  for (int p = 0; p < 2 * steps; ++p) {
    std::vector<Path> next;
    for (const auto& x : paths) {
      if (p % 2 == 0) {
        for (int k = 0; k < 2; ++k) next.push_back({x.m, k, x.S, w(k, x.coin) * x.a});
      } else {
        const double alpha = x.S * off * kPi / L;
        next.push_back({x.m, x.coin, x.S, c * x.a});
        if (x.coin == 0)
          next.push_back({x.m + 1, 1, x.S, i * s * std::exp(2.0 * i * alpha) * x.a});
        else
          next.push_back({x.m - 1, 0, x.S, i * s * std::exp(-2.0 * i * alpha) * x.a});
      }
    }
    if (p + 1 < 2 * steps)
      for (auto& x : next) {
        x.a *= std::polar(1.0, -kTwoPi * lam * d / (L * L) * x.m * x.m);
        x.S += x.m;
      }
    paths = std::move(next);
  }
  const Window win{-steps - 1, steps + 1, 0, 0};
  std::vector<double> p(win.sites(), 0.0);
  double total = 0.0;
  for (const auto& x : paths)
    for (const auto& y : paths) {
      if (x.m != y.m || x.coin != y.coin) continue;
      const double dx = (x.S - y.S) * off;
      const double v = std::exp(-dx * dx / (2 * cfg.waist * cfg.waist)) *
                       std::real(x.a * std::conj(y.a));
      p[static_cast<std::size_t>(x.m - win.x_min)] += v;
      total += v;
    }
  for (double& v : p) v /= total;
  return make_distribution(win, std::move(p));
}

}  // namespace

TEST_CASE("zero plate distance reproduces the ideal walk") {
  OpticalConfig cfg;
  cfg.plate_distance = 0.0;
  const auto r = simulate_nonidealities_1d(kPi / 2, 8, cfg, coin::R());
  CHECK(r.similarity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.raw_total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ideal reference equals a 1D lattice walk") {
  StepProtocol p;
  p.plates = {PlateDescriptor::uniform(kPi / 2), PlateDescriptor::grating(Axis::X, kPi / 2)};
  const auto walk = distribution(evolve(localized_state({0, 0}, coin::H()), p, 6));
  const auto r = simulate_nonidealities_1d(kPi / 2, 6, OpticalConfig{}, coin::H());
  for (int m = -6; m <= 6; ++m) CHECK(r.ideal.at(m, 0) == doctest::Approx(walk.at(m, 0)));
}

TEST_CASE("merged path-sum equals unmerged enumeration") {
  OpticalConfig cfg;
  cfg.plate_distance = 0.3;
  cfg.period = 1e-3;
  for (int steps = 1; steps <= 4; ++steps) {
    CAPTURE(steps);
    const auto r = simulate_nonidealities_1d(kPi / 2, steps, cfg, coin::R());
    const auto b = brute_force(kPi / 2, steps, cfg, coin::R());
    for (int m = -steps; m <= steps; ++m)
      CHECK(r.real.at(m, 0) == doctest::Approx(b.at(m, 0)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("default optical parameters keep the walk close to ideal") {
  const auto r = simulate_nonidealities_1d(kPi / 2, 10, OpticalConfig{}, coin::R());
  CHECK(r.similarity >= 0.99);
  CHECK(r.real.total == doctest::Approx(1.0));
}

TEST_CASE("similarity degrades with plate distance and step count") {
  OpticalConfig cfg;
  double prev = 1.0 + 1e-12;
  for (double d : {0.0, 0.01, 0.02, 0.05, 0.1, 0.2}) {
    cfg.plate_distance = d;
    const double s = simulate_nonidealities_1d(kPi / 2, 10, cfg, coin::R()).similarity;
    CHECK(s <= prev);
    prev = s;
  }
  cfg.plate_distance = 0.02;
  prev = 1.0 + 1e-12;
  for (int t = 1; t <= 12; ++t) {
    const double s = simulate_nonidealities_1d(kPi / 2, t, cfg, coin::R()).similarity;
    CHECK(s <= prev);
    prev = s;
  }
}

TEST_CASE("a finer grating period breaks the ideal regime") {
  OpticalConfig cfg;
  cfg.period = 0.5e-3;
  CHECK(simulate_nonidealities_1d(kPi / 2, 10, cfg, coin::R()).similarity < 0.5);
}

TEST_CASE("path-sum depth limit") {
  try {
    simulate_nonidealities_1d(kPi / 2, 15, OpticalConfig{}, coin::R());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CombinatorialLimit);
  }
}
