#include <cmath>
#include <string>

#include "doctest.h"
#include "ibvp/config.hpp"
#include "json.hpp"

using namespace ibvp;

TEST_CASE("data spec grammar") {
  auto c = DataSpec::parse("const:1.5");
  CHECK(c.function()(123.0) == 1.5);
  auto s = DataSpec::parse("step:0:1:-1");
  CHECK(s.function()(-0.1) == 1.0);
  CHECK(s.function()(0.0) == -1.0);
  auto sn = DataSpec::parse("sin:0.5:0.25:1:0");
  CHECK(sn.function()(0.25) == doctest::Approx(0.75));
  auto cs = DataSpec::parse("cos:0:2:0.5:0");
  CHECK(cs.function()(1.0) == doctest::Approx(-2.0));
  for (const char* bad : {"", "const", "const:x", "step:1:2", "tan:1", "sin:1:2:3",
                          "const:1:2", "const:nan"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(DataSpec::parse(bad), Error);
  }
  for (const char* text : {"const:-1", "step:0.5:2:-3", "sin:0.5:0.25:-1:0",
                           "cos:0.1:0.3:2:1.5"}) {
    CHECK(DataSpec::parse(text).str() == text);
  }
}

TEST_CASE("config round trip") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    auto c = preset_config(name);
    c.seed = 987654321987ULL;
    c.tol = 1.0 / 3.0;
    c.cfl = 0.1 + 0.2;
    c.fault = "sign-form";
    const auto text = serialize_config(c);
    const auto back = parse_config(text);
    CHECK(back == c);
    CHECK(serialize_config(back) == text);
    CHECK(config_hash(back) == config_hash(c));
  }
}

TEST_CASE("config parsing and validation") {
  const auto c = parse_config(
      "[problem]\nflux = linear:2\nu0 = step:0.5:1:0\nT = 0.25\n"
      "[grid]\ncells = 64\n[experiment]\nseed = 7\n");
  CHECK(c.flux == "linear:2");
  CHECK(c.cells == 64);
  CHECK(c.seed == 7);
  CHECK(c.T == 0.25);
  CHECK(c.u0.function()(0.7) == 0.0);
  CHECK(c.problem().flux.f1(0, 0, 1.5) == doctest::Approx(3.0));
  CHECK(c.grid().cells == 64);

  CHECK_THROWS_AS(parse_config("[problem]\nflux = nope\n"), Error);
  CHECK_THROWS_AS(parse_config("[problem]\ncolour = red\n"), Error);
  CHECK_THROWS_AS(parse_config("[grid]\ncells = 2\n"), Error);
  CHECK_THROWS_AS(parse_config("[grid]\ncells = ten\n"), Error);
  CHECK_THROWS_AS(parse_config("[grid]\ncfl = 1.5\n"), Error);
  CHECK_THROWS_AS(parse_config("[problem]\na = 1\nb = 0\n"), Error);
  CHECK_THROWS_AS(parse_config("[sweep]\nfault = everything\n"), Error);
  CHECK_THROWS_AS(parse_config("[residuals]\ndefinition = xyz\n"), Error);
  CHECK_THROWS_AS(parse_config("loose = 1\n"), Error);
  CHECK_THROWS_AS(parse_config("[boundary]\nnu = 0.5\n"), Error);
  CHECK_THROWS_AS(preset_config("missing"), Error);
  CHECK_THROWS_AS(load_config("/nonexistent/ibvp.ini"), Error);
}

TEST_CASE("config JSON export and hash") {
  const auto a = preset_config("reference");
  auto b = a;
  b.seed = 2;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a).size() == 16);
  const auto j = nlohmann::json::parse(config_json(a));
  CHECK(j["problem"]["flux"] == "burgers");
  CHECK(j["problem"]["ub_right"] == "const:-1");
  CHECK(j["grid"]["cells"] == 200);
}
