#include <doctest.h>

#include <fstream>

#include "params.hpp"
#include "qwalk/coin_ops.hpp"
#include "qwalk/errors.hpp"

using namespace qw;
using nlohmann::json;

TEST_CASE("angle parsing") {
  CHECK(cli::parse_angle("pi/2") == doctest::Approx(kPi / 2));
  CHECK(cli::parse_angle("7pi/8") == doctest::Approx(7 * kPi / 8));
  CHECK(cli::parse_angle("3*pi/4") == doctest::Approx(3 * kPi / 4));
  CHECK(cli::parse_angle("-pi/4") == doctest::Approx(-kPi / 4));
  CHECK(cli::parse_angle("\xcf\x80/2") == doctest::Approx(kPi / 2));
  CHECK(cli::parse_angle("2π") == doctest::Approx(kTwoPi));
  CHECK(cli::parse_angle(" 1.5708 ") == doctest::Approx(1.5708));
  CHECK(cli::parse_angle("pi") == doctest::Approx(kPi));
  for (const char* bad : {"", "pie", "pi/0", "1.5x", "pi/2/3", "--1"})
    CHECK_THROWS_AS(cli::parse_angle(bad), Error);
}

TEST_CASE("every verb has output and threads") {
  for (const auto& v : cli::verbs()) {
    CAPTURE(v.name);
    const auto r = cli::resolve(v, json::object(), {});
    CHECK(r.contains("output"));
    CHECK(r.contains("threads"));
  }
  CHECK_THROWS_AS(cli::verb("nope"), Error);
}

TEST_CASE("resolution order: defaults, file, flags") {
  const auto& v = cli::verb("chern");
  auto r = cli::resolve(v, json::object(), {});
  CHECK(r["delta"].get<double>() == doctest::Approx(kPi / 2));
  CHECK(r["grid"] == 24);

  const json file{{"schema_version", 1}, {"command", "chern"}, {"delta", "pi/8"}, {"grid", 48}};
  r = cli::resolve(v, file, {});
  CHECK(r["delta"].get<double>() == doctest::Approx(kPi / 8));
  CHECK(r["grid"] == 48);

  r = cli::resolve(v, file, {{"grid", "32"}});
  CHECK(r["grid"] == 32);
  CHECK(r["delta"].get<double>() == doctest::Approx(kPi / 8));
}

TEST_CASE("bad configurations are rejected") {
  const auto& v = cli::verb("chern");
  CHECK_THROWS_AS(cli::resolve(v, json{{"gird", 24}}, {}), Error);
  CHECK_THROWS_AS(cli::resolve(v, json{{"schema_version", 2}}, {}), Error);
  CHECK_THROWS_AS(cli::resolve(v, json{{"command", "bands"}}, {}), Error);
  CHECK_THROWS_AS(cli::resolve(v, json{{"grid", 2.5}}, {}), Error);
  CHECK_THROWS_AS(cli::resolve(v, json{{"band", "middle"}}, {}), Error);
  CHECK_THROWS_AS(cli::resolve(v, json::array(), {}), Error);
  CHECK_THROWS_AS(cli::resolve(v, json::object(), {{"grid", "abc"}}), Error);
  CHECK_THROWS_AS(cli::resolve(v, json::object(), {{"colour", "red"}}), Error);
  CHECK_THROWS_AS(cli::resolve(cli::verb("deviations"), json::object(), {{"steps", "1001"}}), Error);
}

TEST_CASE("shipped schema matches the parameter tables") {
  std::ifstream in(QWALK_SCHEMA_FILE);
  REQUIRE(in.good());
  const json shipped = json::parse(in);
  CHECK(shipped == cli::config_schema());
}
