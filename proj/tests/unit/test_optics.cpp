#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>

#include "qwalk/errors.hpp"
#include "qwalk/optics.hpp"

using namespace qw;

TEST_CASE("optical constants") {
  const OpticalConfig c;
  CHECK(c.site_pitch() == doctest::Approx(63.28e-6));
  CHECK(spot_radius(c) == doctest::Approx(20.14e-6).epsilon(1e-3));
  CHECK(c.rayleigh_range() == doctest::Approx(kPi * 25e-6 / 632.8e-9));
  CHECK(c.delta_k() == doctest::Approx(kTwoPi / 5e-3));
  const auto mode = gaussian_mode({2, -1}, c);
  CHECK(mode.k_perp[0] == doctest::Approx(2 * c.delta_k()));
  CHECK(mode.radius(mode.rayleigh_range()) == doctest::Approx(std::sqrt(2.0) * c.waist));
  CHECK(mode.gouy(mode.rayleigh_range()) == doctest::Approx(kPi / 4));
  OpticalConfig bad;
  bad.waist = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("camera position inverts") {
  const OpticalConfig c;
  const auto r = camera_position(Site{3, -2}, c);
  CHECK(r[0] == doctest::Approx(3 * c.site_pitch()));
  CHECK(r[1] == doctest::Approx(-2 * c.site_pitch()));
  const auto k = k_perp_from_camera(r, c);
  CHECK(k[0] == doctest::Approx(3 * c.delta_k()));
  CHECK(k[1] == doctest::Approx(-2 * c.delta_k()));
}

TEST_CASE("adjacent spot overlap") {
  OpticalConfig c;
  const auto o = adjacent_mode_overlap(c);
  CHECK(o.amplitude < 0.01);
  CHECK(o.power == doctest::Approx(o.amplitude * o.amplitude));
  CHECK(o.box_leakage < 1e-2);
  c.waist = c.period / 2;
  CHECK(adjacent_mode_overlap(c).amplitude > 0.2);
  c.waist = 10 * c.period;
  CHECK(adjacent_mode_overlap(c).amplitude < 1e-20);
}

TEST_CASE("single spot has the expected radius and power") {
  const OpticalConfig c;
  RasterSpec r;
  r.nx = r.ny = 128;
  r.pixel = 1e-6;
  const auto img = render_focal_plane(localized_state({0, 0}, coin::H()), c, r);
  CHECK(img.total() == doctest::Approx(1.0).epsilon(1e-3));
  // second moment of e^{-2r²/w̃²} along x is w̃²/4
  double m2 = 0.0;
  for (int j = 0; j < img.ny; ++j)
    for (int i = 0; i < img.nx; ++i) m2 += img.at(i, j) * img.x(i) * img.x(i);
  CHECK(std::sqrt(4 * m2 / img.total()) == doctest::Approx(spot_radius(c)).epsilon(1e-3));
}

TEST_CASE("render and read out round trip") {
  const OpticalConfig c;
  const auto grid = analytic_site_grid(c, 6);
  for (int t = 0; t <= 5; ++t) {
    CAPTURE(t);
    const auto psi = evolve(localized_state({0, 0}, coin::H()), protocol_U(kPi / 2), t);
    const auto ideal = distribution(psi);
    const auto img = render_focal_plane(psi, c);
    CHECK(img.clipped_fraction < 1e-6);
    CHECK(boxed_power_fraction(img, grid) >= 0.98);
    CHECK(similarity(ideal, extract_distribution(img, grid)) >= 0.99);
  }
}

TEST_CASE("calibration recovers the site grid") {
  const OpticalConfig c;
  const auto ref = analytic_site_grid(c, 4);
  const auto cal = calibrate_sites(c, 4);
  const double tol = 0.1 * RasterSpec{}.pixel;
  for (int mx = -4; mx <= 4; mx += 2)
    for (int my = -4; my <= 4; my += 4) {
      const auto a = ref.position(mx, my), b = cal.position(mx, my);
      CHECK(std::abs(a[0] - b[0]) < tol);
      CHECK(std::abs(a[1] - b[1]) < tol);
    }
  CHECK(cal.box_half_width == doctest::Approx(c.site_pitch() / 2).epsilon(0.01));

  CalibrationOptions o;
  o.raster.tilt = kPi / 180;
  const auto tilted = calibrate_sites(c, 4, o);
  const auto ta = analytic_site_grid(c, 4, o.raster.tilt);
  CHECK(std::abs(tilted.a_x[1] - ta.a_x[1]) < tol);
  CHECK(std::abs(tilted.a_y[0] - ta.a_y[0]) < tol);
}

TEST_CASE("beam radius to wavepacket width") {
  const OpticalConfig c;
  CHECK(sigma_for_beam_radius(0.62e-3, c) == doctest::Approx(c.period / (kPi * 0.62e-3)));
}

TEST_CASE("16-bit PGM output") {
  CameraImage img;
  img.nx = 3;
  img.ny = 2;
  img.pixel = 1e-6;
  img.data = {0.0, 0.5, 1.0, 0.25, 0.0, 0.0};
  const auto path = (std::filesystem::temp_directory_path() / "qwalk_test.pgm").string();
  write_pgm16(path, img, {"hello"});
  std::ifstream in(path, std::ios::binary);
  const std::string bytes{std::istreambuf_iterator<char>(in), {}};
  std::remove(path.c_str());
  REQUIRE(bytes.rfind("P5\n", 0) == 0);
  CHECK(bytes.find("# hello\n") != std::string::npos);
  const auto hdr = bytes.find("3 2\n65535\n");
  REQUIRE(hdr != std::string::npos);
  const auto px = bytes.substr(hdr + 10);
  REQUIRE(px.size() == 12);
  // top row is max y: (0.25, 0, 0) first
  auto word = [&](int k) {
    return (static_cast<unsigned char>(px[2 * k]) << 8) | static_cast<unsigned char>(px[2 * k + 1]);
  };
  CHECK(word(0) == 16384);
  CHECK(word(3) == 0);
  CHECK(word(5) == 65535);
}

TEST_CASE("empty image cannot be read out") {
  const OpticalConfig c;
  CameraImage img;
  img.nx = img.ny = 4;
  img.pixel = 5e-6;
  img.origin_x = img.origin_y = -1e-5;
  img.data.assign(16, 0.0);
  CHECK_THROWS_AS(extract_distribution(img, analytic_site_grid(c, 1)), Error);
}
