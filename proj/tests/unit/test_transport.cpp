#include <doctest.h>

#include <vector>

#include "qwalk/parallel.hpp"
#include "qwalk/transport.hpp"

using namespace qw;

TEST_CASE("line fits") {
  const std::vector<double> t{0, 1, 2, 3, 4};
  const std::vector<double> y{1, 3, 5, 7, 9};
  const auto f = fit_line(t, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.slope_err == doctest::Approx(0.0).epsilon(1e-9).scale(1.0));
  const std::vector<double> z{0, 2, 4, 6, 8};
  CHECK(fit_line(t, z).origin_slope == doctest::Approx(2.0));
}

TEST_CASE("wavepacket is normalised and centred") {
  WavepacketSpec spec;
  spec.q0 = {kPi / 2, kPi};
  const auto s = make_wavepacket(spec);
  CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
  const auto [x, y] = center_of_mass(distribution(s));
  CHECK(std::abs(x) < 1e-9);
  CHECK(std::abs(y) < 1e-9);
}

TEST_CASE("measured group velocity follows the band") {
  WavepacketSpec spec;
  spec.q0 = {kPi / 2, kPi};
  const auto v = measure_group_velocity(spec, 5);
  CHECK(v.vx == doctest::Approx(0.0).epsilon(0.03).scale(1.0));
  CHECK(v.vy == doctest::Approx(-0.5).epsilon(0.03).scale(1.0));
}

TEST_CASE("no force means no transverse drift after band averaging") {
  BandAverageOptions o;
  o.grid = 5;
  const auto r = band_averaged_displacement(kPi / 2, Band::Lower, 0.0, o);
  for (double d : r.dx) CHECK(std::abs(d) < 1e-9);
}

TEST_CASE("forced packet tracks the semiclassical orbit") {
  WavepacketSpec spec;
  spec.q0 = {0.7, -0.4};
  spec.band = Band::Lower;
  spec.delta = kPi / 2;
  const double F = kPi / 20;
  const auto tr = forced_trajectory(spec, make_force(F, kPi / 2), 5);
  const auto sc = semiclassical_displacement(spec.q0, kPi / 2, Band::Lower, F, 5);
  CHECK(tr.dx.back() == doctest::Approx(sc[0]).epsilon(0.1).scale(1.0));
  CHECK(tr.dy.back() == doctest::Approx(sc[1]).epsilon(0.1).scale(1.0));
  CHECK_FALSE(tr.adiabatic_warning);
}

TEST_CASE("force warning threshold") {
  const auto f = make_force(10.0, kPi / 2);
  CHECK(f.warning());
  CHECK_FALSE(make_force(kPi / 20, kPi / 2).warning());
}

TEST_CASE("misalignment Monte Carlo") {
  const auto p = protocol_U(kPi / 2, 5e-3);
  const auto in = localized_state({0, 0}, coin::H());
  const auto ideal = center_of_mass(distribution(evolve(in, p, 5)));
  const auto zero = misalignment_monte_carlo(p, in, 5, 0.0, 3, 1);
  CHECK(zero.mean_x == doctest::Approx(ideal.first));
  CHECK(zero.std_x == doctest::Approx(0.0).scale(1.0));

  set_thread_count(1);
  const auto a = misalignment_monte_carlo(p, in, 5, 0.01, 8, 17);
  set_thread_count(4);
  const auto b = misalignment_monte_carlo(p, in, 5, 0.01, 8, 17);
  set_thread_count(0);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k) CHECK(a.samples[k] == b.samples[k]);
}
