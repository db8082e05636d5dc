#include <doctest.h>

#include <Eigen/Dense>

#include "qwalk/edge.hpp"

using namespace qw;

TEST_CASE("reflecting strip is unitary, truncated strip is not") {
  for (double qy : {-2.0, 0.0, 1.3}) {
    const auto u = strip_operator(kPi / 2, qy, 12);
    const auto n = u.rows();
    CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-12);
    const auto t = strip_operator(kPi / 2, qy, 12, StripBoundary::Truncated);
    CHECK((t.adjoint() * t - Eigen::MatrixXcd::Identity(n, n)).norm() > 1e-3);
  }
}

TEST_CASE("localization measure") {
  CHECK(localization_measure(0.0, 20) == doctest::Approx(0.0));
  CHECK(localization_measure(20.0, 20) == doctest::Approx(-12.0));
  CHECK(localization_measure(18.0, 20) == doctest::Approx(-1.0));
}

TEST_CASE("strip spectrum shape and symmetry") {
  const auto s = strip_spectrum(kPi / 2, 12, 41);
  REQUIRE(s.q_y.size() == 41);
  CHECK(s.q_y.front() == doctest::Approx(-kPi));
  for (const auto& row : s.states) {
    CHECK(row.size() == static_cast<std::size_t>(2 * (2 * 12 + 1)));
    for (std::size_t k = 1; k < row.size(); ++k) CHECK(row[k - 1].epsilon <= row[k].epsilon);
  }
  CHECK(strip_symmetry_defect(s) < 1e-8);
}

TEST_CASE("bulk-edge correspondence in the three phases") {
  const int expect_nu[] = {0, 1, 0};
  const double deltas[] = {kPi / 8, kPi / 2, 7 * kPi / 8};
  for (int k = 0; k < 3; ++k) {
    CAPTURE(deltas[k]);
    const auto r = bulk_edge_check(deltas[k], 20, 101);
    CHECK(r.chern_minus == expect_nu[k]);
    CHECK(r.consistent);
    CHECK(r.n0_right - r.npi_right == expect_nu[k]);
    CHECK(r.n0_left == -r.n0_right);
  }
}
