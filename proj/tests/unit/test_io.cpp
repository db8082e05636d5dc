#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qwalk/errors.hpp"
#include "qwalk/io.hpp"

using namespace qw;

namespace {

std::string temp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config hash is FNV-1a of the sorted dump") {
  CHECK(io::config_hash(nlohmann::json{{"a", 1}}) == "9c3e82dd6fcae8b1");
  const auto x = nlohmann::json::parse(R"({"b": 2, "a": 1})");
  const auto y = nlohmann::json::parse(R"({"a": 1, "b": 2})");
  CHECK(io::config_hash(x) == io::config_hash(y));
  CHECK(io::config_hash(x) != io::config_hash(nlohmann::json{{"a", 1}, {"b", 3}}));
}

TEST_CASE("header lines") {
  const auto h = io::header_lines({"chern", "0123456789abcdef", {"note"}});
  REQUIRE(h.size() == 4);
  CHECK(h[0] == "qwalk schema 1");
  CHECK(h[1] == "command chern");
  CHECK(h[3] == "note");
}

TEST_CASE("distribution CSV round trip") {
  const auto d = distribution(evolve(localized_state({0, 0}, coin::H()), protocol_U(kPi / 2), 3));
  const auto path = temp("qwalk_io_dist.csv");
  io::write_distribution_csv(path, d, {"evolve", "", {}});
  const auto text = slurp(path);
  CHECK(text.rfind("# qwalk schema 1\n# command evolve\nm_x,m_y,p\n", 0) == 0);
  const auto back = io::read_distribution_csv(path);
  std::remove(path.c_str());
  CHECK(back.window.x_min == d.window.x_min);
  CHECK(back.window.y_max == d.window.y_max);
  for (int y = d.window.y_min; y <= d.window.y_max; ++y)
    for (int x = d.window.x_min; x <= d.window.x_max; ++x) CHECK(back.at(x, y) == d.at(x, y));
}

TEST_CASE("malformed CSV is an I/O error") {
  const auto path = temp("qwalk_io_bad.csv");
  {
    std::ofstream out(path);
    out << "m_x,m_y,p\n1;2;3\n";
  }
  try {
    io::read_distribution_csv(path);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
  std::remove(path.c_str());
  CHECK_THROWS_AS(io::read_distribution_csv(temp("qwalk_io_missing.csv")), Error);
}

TEST_CASE("JSON output carries meta") {
  const auto path = temp("qwalk_io.json");
  io::write_json(path, {{"chern_minus", 1}}, {"chern", "00000000000000ff", {}});
  const auto j = nlohmann::json::parse(slurp(path));
  std::remove(path.c_str());
  CHECK(j["chern_minus"] == 1);
  CHECK(j["meta"]["config_hash"] == "00000000000000ff");
  CHECK(j["meta"]["schema_version"] == 1);
}

TEST_CASE("trajectory CSV") {
  const auto path = temp("qwalk_io_traj.csv");
  io::write_trajectory_csv(path, {0.0, 0.5}, {0.0, -0.25}, {});
  const auto text = slurp(path);
  std::remove(path.c_str());
  CHECK(text.find("t,dx,dy\n0,0,0\n1,0.5,-0.25\n") != std::string::npos);
}

TEST_CASE("distribution JSON") {
  const auto d = make_distribution(Window{-1, 0, 2, 2}, {0.25, 0.75});
  const auto j = io::to_json(d);
  CHECK(j["window"]["x_min"] == -1);
  REQUIRE(j["rows"].size() == 2);
  CHECK(j["rows"][1] == nlohmann::json{0, 2, 0.75});
}
