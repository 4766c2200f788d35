#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "hdg/config.hpp"
#include "hdg/output.hpp"

using namespace hdg;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("config parsing, comments and overrides") {
  const auto c = Config::from_text(
      "# header\n"
      "channel.L = 2e5   # trailing comment\n"
      "\n"
      "slice.snapshots = 120, 240,600\n"
      "slice.advection = off\n"
      "channel.L = 3e5\n");
  CHECK(c.get_double("channel.L", 0.0) == 3e5);
  CHECK(c.get_doubles("slice.snapshots", {}) == std::vector<double>{120.0, 240.0, 600.0});
  CHECK_FALSE(c.get_bool("slice.advection", true));
  CHECK(c.get_int("slice.nx", 17) == 17);

  Config o = c;
  o.set("channel.L=1.5e5");
  o.set(" slice.nx = 12 ");
  CHECK(o.get_double("channel.L", 0.0) == 1.5e5);
  CHECK(o.get_int("slice.nx", 0) == 12);
  CHECK(o.get_string("slice.missing", "x") == "x");

  CHECK_THROWS_AS((void)Config::from_text("no equals sign"), ConfigError);
  CHECK_THROWS_AS(o.set("novalue"), ConfigError);
  CHECK_THROWS_AS(o.set("bad key", "1"), ConfigError);
  o.set("slice.dt", "fast");
  CHECK_THROWS_AS((void)o.get_double("slice.dt", 0.5), ConfigError);
  o.set("slice.nz", "2.5");
  CHECK_THROWS_AS((void)o.get_int("slice.nz", 1), ConfigError);
  o.set("slice.bathymetry", "maybe");
  CHECK_THROWS_AS((void)o.get_bool("slice.bathymetry", true), ConfigError);
  CHECK_THROWS_AS((void)Config::from_file("/nonexistent/hdg.cfg"), ConfigError);
}

TEST_CASE("unused keys are reported per namespace") {
  auto c = Config::from_text("channel.L = 2e5\nchannel.Lx = 1\nsector.A = 1\n");
  (void)channel_params(c);
  CHECK(c.unused_keys("channel.") == std::vector<std::string>{"channel.Lx"});
  CHECK(c.unused_keys("sector.") == std::vector<std::string>{"sector.A"});
}

TEST_CASE("echo lists explicit values and the defaults that were read") {
  const auto c = Config::from_text("slice.dt = 0.1\n");
  const auto s = slice_config(c, ScenarioKind::StandingWave);
  CHECK(s.dt == 0.1);
  const std::string e = c.echo();
  CHECK(e.find("slice.dt=0.1") != std::string::npos);
  CHECK(e.find("slice.nx=40") != std::string::npos);
  CHECK(e.find("slice.eta0=0.1") != std::string::npos);
  CHECK(e.find('\n') == std::string::npos);
  // invalid values surface as configuration errors
  CHECK_THROWS_AS((void)slice_config(Config::from_text("slice.nx = 1\n"), ScenarioKind::StandingWave), ConfigError);
  CHECK_THROWS_AS((void)channel_params(Config::from_text("channel.L1 = 1e9\n")), ConfigError);
}

TEST_CASE("numbers round-trip through their text form") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-30.0, 30.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(U(rng), static_cast<int>(U(rng)));
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(parse_ints("10, 20,40") == std::vector<int>{10, 20, 40});
}

TEST_CASE("CSV and grid files") {
  const auto dir = std::filesystem::temp_directory_path() / "hdg_test_cli";
  std::filesystem::create_directories(dir);
  CsvTable t{{"N", "e2"}, {}};
  t.add_row({10, 0.25});
  t.add_row({20, 1.0 / 3.0});
  write_csv((dir / "t.csv").string(), t, "a=1 b=2");
  CHECK(slurp(dir / "t.csv") == "# config: a=1 b=2\nN,e2\n10,0.25\n20,0.3333333333333333\n");

  GridField g{"q", 1.5, 2, 2, 0.0, 1.0, -1.0, 0.0, {1.0, 2.0, 3.0, 4.0}, {0, 1, 0, 0}};
  write_grid((dir / "g.grid").string(), g, "x=1");
  CHECK(slurp(dir / "g.grid") == "# config: x=1\n# field: q t=1.5\n2 2 0 1 -1 0\n1 nan\n3 4\n");
  g.values.pop_back();
  CHECK_THROWS_AS(write_grid((dir / "bad.grid").string(), g, ""), std::invalid_argument);
  CHECK_THROWS_AS(write_csv("/nonexistent/dir/t.csv", t, ""), std::runtime_error);
  std::filesystem::remove_all(dir);
}
