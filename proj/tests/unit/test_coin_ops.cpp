#include <doctest.h>

#include <random>

#include "qwalk/coin_ops.hpp"
#include "qwalk/errors.hpp"
#include "support.hpp"

using namespace qw;

namespace {

const cplx I{0.0, 1.0};

Mat2 mat(cplx a, cplx b, cplx c, cplx d) {
  Mat2 m;
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("uniform plate reference values") {
  CHECK((lc_plate(0.0, 0.7).matrix - Mat2::Identity()).norm() < 1e-15);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK((lc_plate(kPi / 2, 0.0).matrix - mat(r, I * r, I * r, r)).norm() < 1e-15);
  CHECK((lc_plate(kPi, 0.0).matrix - mat(0.0, I, I, 0.0)).norm() < 1e-15);
  CHECK((lc_plate(kTwoPi, 0.3).matrix + Mat2::Identity()).norm() < 1e-12);
}

TEST_CASE("grating plate in momentum space") {
  CHECK((g_plate_momentum(Axis::X, 0.0, 0.0, 1.3).matrix - Mat2::Identity()).norm() < 1e-15);
  CHECK((g_plate_momentum(Axis::X, kPi, 0.0, 0.0).matrix - mat(0.0, I, I, 0.0)).norm() < 1e-15);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK((g_plate_momentum(Axis::X, kPi / 2, 0.0, kPi).matrix - mat(r, -I * r, -I * r, r)).norm() <
        1e-15);
  for (double d : {0.3, 1.2, 2.9})
    for (double a : {0.0, 0.4, -1.1})
      CHECK(phase_distance(g_plate_momentum(Axis::Y, d, a, 0.0).matrix, lc_plate(d, a).matrix) <
            1e-14);
}

TEST_CASE("every operator is unitary") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int k = 0; k < 200; ++k) {
    const double d = u(rng), a = u(rng), q = u(rng);
    CHECK(unitarity_defect(lc_plate(d, a).matrix) < 1e-12);
    CHECK(unitarity_defect(g_plate_momentum(Axis::X, d, a, q).matrix) < 1e-12);
    const Quasimomentum qq{u(rng), u(rng)};
    CHECK(unitarity_defect(step_matrix(protocol_U(d), qq).matrix) < 1e-12);
    CHECK(unitarity_defect(step_matrix(protocol_U_inverse(d), qq, 3, 0.2).matrix) < 1e-12);
  }
}

TEST_CASE("retardations add on a common axis") {
  for (double a : {0.0, 0.5, 2.0})
    for (double d1 : {0.2, 1.7})
      for (double d2 : {0.9, 4.0})
        CHECK(phase_distance(lc_plate(d1, a).matrix * lc_plate(d2, a).matrix,
                             lc_plate(d1 + d2, a).matrix) < 1e-13);
}

TEST_CASE("protocol U and its inverse") {
  const auto u = protocol_U(kPi / 2);
  REQUIRE(u.plates.size() == 3);
  CHECK(u.plates[0].kind == PlateKind::Uniform);
  CHECK(u.plates[1].axis == Axis::X);
  CHECK(u.plates[2].axis == Axis::Y);
  CHECK(u.plates[1].delta == doctest::Approx(kPi / 2));

  const auto inv = protocol_U_inverse(kPi / 2);
  REQUIRE(inv.plates.size() == 3);
  CHECK(inv.plates[0].axis == Axis::Y);
  for (const auto& p : inv.plates) CHECK(p.delta == doctest::Approx(3 * kPi / 2));

  const auto w = step_matrix(protocol_U(0.0), {0.4, -2.0}).matrix;
  CHECK(phase_distance(w, lc_plate(kPi / 2, 0.0).matrix) < 1e-14);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> q(-kPi, kPi), d(0.0, kTwoPi);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const double delta = d(rng);
    const Quasimomentum qq{q(rng), q(rng)};
    const Mat2 prod =
        step_matrix(protocol_U_inverse(delta), qq).matrix * step_matrix(protocol_U(delta), qq).matrix;
    worst = std::max(worst, phase_distance(prod, Mat2::Identity()));
    // the physical inverse is -U^{-1} exactly
    CHECK((prod + Mat2::Identity()).norm() < 1e-12);
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("force enters as a time-dependent grating offset") {
  const auto p = protocol_U(kPi / 2);
  const Quasimomentum q{0.3, -1.0};
  CHECK(phase_distance(step_matrix(p, q, 7, 0.0).matrix, step_matrix(p, q).matrix) < 1e-15);
  // positive force drives q_x(t) = q_x - F t
  const double F = kPi / 20;
  CHECK(phase_distance(step_matrix(p, {0.0, 0.0}, 1, F).matrix,
                       step_matrix(p, {-F, 0.0}).matrix) < 1e-14);
  CHECK(phase_distance(step_matrix(p, q, 4, F).matrix,
                       step_matrix(p, {q.x - 4 * F, q.y}).matrix) < 1e-13);

  // the same matrix from a physically displaced x-grating
  StepProtocol shifted = p;
  const double period = 5e-3;
  shifted.period = period;
  const double shift = shift_for_alpha_offset(force_alpha_offset(3, F), period);
  CHECK(shift == doctest::Approx(-3 * F * period / kTwoPi));
  shifted.plates[1].shift = shift;
  CHECK(phase_distance(step_matrix(shifted, q).matrix, step_matrix(p, q, 3, F).matrix) < 1e-14);
}

TEST_CASE("plate shifts act through the optic-axis offset") {
  const double period = 2.0;
  const auto g = PlateDescriptor::grating(Axis::X, 1.0, 0.25, 0.5);
  CHECK(effective_alpha0(g, period) == doctest::Approx(0.25 - kPi * 0.5 / period));
  // a full period leaves the grating unchanged up to the α → α - π wrap
  const auto full = PlateDescriptor::grating(Axis::X, 1.0, 0.25, period);
  CHECK(phase_distance(g_plate_momentum(Axis::X, 1.0, effective_alpha0(full, period), 0.7).matrix,
                       g_plate_momentum(Axis::X, 1.0, 0.25, 0.7).matrix) < 1e-14);
}

TEST_CASE("retardation is stored modulo 2π") {
  CHECK(PlateDescriptor::uniform(kTwoPi + 0.5).delta == doctest::Approx(0.5));
  CHECK(PlateDescriptor::grating(Axis::Y, -0.5).delta == doctest::Approx(kTwoPi - 0.5));
}

TEST_CASE("phase distance ignores global phase only") {
  const Mat2 a = lc_plate(1.1, 0.3).matrix;
  CHECK(phase_distance(a, std::polar(1.0, 2.2) * a) < 1e-15);
  CHECK(phase_distance(a, lc_plate(1.2, 0.3).matrix) > 1e-3);
}

TEST_CASE("coin basis states") {
  CHECK(coin::H().norm() == doctest::Approx(1.0));
  CHECK(std::abs(coin::H().dot(coin::V())) < 1e-15);
  CHECK(std::abs(coin::A().dot(coin::D())) < 1e-15);
  CHECK(std::abs(coin::A()(1) - cplx(0.0, -1.0 / std::sqrt(2.0))) < 1e-15);
}

TEST_CASE("protocol validation") {
  StepProtocol p;
  p.period = -1.0;
  p.plates = {PlateDescriptor::uniform(1.0)};
  CHECK_THROWS_AS(p.validate(), Error);
}
