#include <catch2/catch_amalgamated.hpp>

#include "shiftlab/io.hpp"

using namespace shiftlab;

TEST_CASE("series round trip through JSON") {
  PowerSeries f{cplx{1.0, -2.0}, 0.1, cplx{0.0, 1.0 / 3.0}};
  json j = to_json(f);
  CHECK(j.dump() == "[[1.0,-2.0],[0.1,0.0],[0.0,0.3333333333333333]]");
  CHECK(series_from_json(j) == f);
  CHECK(series_from_json(json::parse(j.dump())) == f);
  CHECK_THROWS_AS(series_from_json(json::array()), InvalidInput);
  CHECK_THROWS_AS(series_from_json(json::parse("[[1, 2, 3]]")), InvalidInput);
}

TEST_CASE("trigonometric polynomials keep their lowest index") {
  TrigPolynomial t({1.0, 2.0, cplx{0.0, 3.0}}, -1);
  json j = to_json(t);
  CHECK(j["min_index"] == -1);
  TrigPolynomial back = trig_from_json(json::parse(j.dump()));
  CHECK(back.min_index() == -1);
  CHECK(back.coeff_vector() == t.coeff_vector());
  CHECK_THROWS_AS(trig_from_json(json::parse(R"({"coeffs": [[1, 0]]})")), InvalidInput);
}

TEST_CASE("sets round trip through JSON") {
  CompactCircleSet E({{0.5, 1.0}, {2.0, 2.25}}, {{3.0, std::nullopt}});
  CompactCircleSet back = set_from_json(json::parse(to_json(E).dump()));
  REQUIRE(back.arcs().size() == 2);
  CHECK(back.arcs()[1].start == 2.0);
  CHECK(back.arcs()[1].end == 2.25);
  REQUIRE(back.points().size() == 1);
  CHECK(back.points()[0].angle == 3.0);
}

TEST_CASE("CSV numbers round trip") {
  CsvTable t({"n", "value", "label"});
  t.add({10LL, 0.1, std::string("plain")});
  t.add({20LL, 1.0 / 3.0, std::string("a,b")});
  std::string s = t.str();
  CHECK(s == "n,value,label\n10,0.10000000000000001,plain\n20,0.33333333333333331,\"a,b\"\n");
  CHECK(std::stod("0.33333333333333331") == 1.0 / 3.0);
  CHECK_THROWS_AS(t.add({1LL}), InvalidInput);
}

TEST_CASE("config parsing") {
  const std::string text = R"(# experiment
seed = 7
n = 8, 16, 32   # schedule

[domain]
kind = two_disk
c2 = 1,0
)";
  Config c = Config::parse(text, "exp.cfg");
  CHECK(c.get_int("seed", 0) == 7);
  CHECK(c.get_sizes("n", {}) == std::vector<std::size_t>{8, 16, 32});
  CHECK(c.get_string("domain.kind", "unit_disk") == "two_disk");
  CHECK(c.get_complex("domain.c2", 0.0) == cplx{1.0, 0.0});
  CHECK(c.get_double("domain.r2", 0.3) == 0.3);
  CHECK_NOTHROW(c.reject_unknown());
  CHECK(c.resolved().at("domain.r2") == "0.29999999999999999");

  SECTION("unknown keys are errors with a line anchor") {
    Config d = Config::parse("seed = 1\n[domain]\nkidn = disk\n", "x.cfg");
    d.get_int("seed", 0);
    try {
      d.reject_unknown();
      FAIL("expected a configuration error");
    } catch (const ConfigError& e) {
      CHECK(e.line() == 3);
      CHECK(std::string(e.what()).find("x.cfg:3") != std::string::npos);
      CHECK(std::string(e.what()).find("domain.kidn") != std::string::npos);
    }
  }

  SECTION("malformed input") {
    CHECK_THROWS_AS(Config::parse("[domain\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("just words\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("a = 1\na = 2\n"), ConfigError);
    Config d = Config::parse("x = 1.5q\nflag = maybe\n");
    CHECK_THROWS_AS(d.get_double("x", 0.0), ConfigError);
    CHECK_THROWS_AS(d.get_bool("flag", false), ConfigError);
  }

  SECTION("command-line overrides") {
    Config d = Config::parse("N = 2\n");
    d.set("N", "5");
    CHECK(d.get_int("N", 0) == 5);
  }

  SECTION("constants and complex lists") {
    Config d = Config::parse("gamma = 0.9, 2pi\nz = 1; 0,1; -0.5,0.25\n");
    auto g = d.get_doubles("gamma", {});
    CHECK(g[1] == two_pi);
    auto z = d.get_complexes("z", {});
    REQUIRE(z.size() == 3);
    CHECK(z[2] == cplx{-0.5, 0.25});
  }
}
