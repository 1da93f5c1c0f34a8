#include <string>

#include "doctest.h"
#include "m2m/config.hpp"
#include "m2m/errors.hpp"

using namespace m2m;
using namespace m2m::io;

TEST_CASE("homogeneous preset expands to the measured scenario") {
  const auto c = config_from_json(Json{{"scenario", "paper_homogeneous"}});
  CHECK(c.device_count() == 50);
  REQUIRE(c.slices.size() == 5);
  for (const auto& s : c.slices) CHECK(s.devices == 10);
  CHECK(c.cell.access_rbs == 25);
  CHECK(c.cell.access_rbs / static_cast<int>(c.slices.size()) == 5);
  CHECK(c.slots_per_period == 100);
  CHECK(c.beta == 0.8);
  CHECK(c.controller.omega == 0.8);
  CHECK(c.controller.mu == 2.0);
  CHECK(c.epsilon == 0.1);
  CHECK(c.phi == 0.1);
  CHECK(c.cell.preambles.preamble_count == 64);
  CHECK(c.rb_transition(0, 0) == 0.9);
  CHECK(c.rb_transition(1, 0) == 0.95);
  CHECK(c.collision.value == 0.0);
}

TEST_CASE("heterogeneous preset") {
  const auto c = config_from_json(Json{{"scenario", "paper_heterogeneous"}});
  CHECK(c.slices[0].devices == 30);
  CHECK(c.slices[4].devices == 5);
  CHECK(c.device_count() == 50);
}

TEST_CASE("every preset validates") {
  for (const auto& name : preset_names()) {
    if (name == "custom") continue;
    CHECK_NOTHROW(config_from_json(preset_json(name)));
  }
  CHECK_THROWS_AS(preset_json("paper_mixed"), ValidationError);
}

TEST_CASE("range violations name the field") {
  try {
    parse_config(R"({"scenario": "paper_homogeneous", "epsilon": 1.5})");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "epsilon");
    CHECK(std::string(e.what()).find("ε must lie in [0,1]") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config(R"({"scenario": "paper_homogeneous", "controller": {"omega": 1.0}})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"scenario": "paper_homogeneous", "beta": "high"})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"scenario": "custom"})"), ValidationError);
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK_THROWS_AS(parse_config(R"({"scenario": "paper_homogeneous", "epsilom": 0.1})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"scenario": "paper_homogeneous", "cell": {"radius": 10}})"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"scenario": "custom", "slices": [{"weight": 1, "devices": 2, "size": 3}]})"),
                  ValidationError);
}

TEST_CASE("missing seed defaults to zero and is echoed") {
  const auto c = parse_config(R"({"scenario": "paper_heterogeneous", "scheme": "pomdp_no_loop"})");
  CHECK(c.seed == 0);
  const auto dump = to_json(c);
  CHECK(dump.at("seed") == 0);
  CHECK(dump.at("scheme") == "pomdp_no_loop");
}

TEST_CASE("syntax errors report line and column") {
  try {
    parse_config("{\n  \"seed\": ,\n}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 11);
  }
}

TEST_CASE("resolved dump reloads to the same config") {
  const char* docs[] = {
      R"({"scenario": "paper_homogeneous"})",
      R"({"scenario": "paper_heterogeneous", "seed": 12, "collision": {"mode": "binomial", "same_choice": 2}})",
      R"({"scenario": "custom", "slices": [{"weight": 2, "devices": 3}, {"weight": 1, "devices": 4, "bandwidth": 2}],
          "cell": {"access_rbs": 6, "data_rbs": 2}, "mean_ratio": 0.3, "controller": {"data_rb_floor": 1}})",
  };
  for (const char* d : docs) {
    const auto first = to_json(parse_config(d));
    const auto second = to_json(config_from_json(first));
    CHECK(first == second);
    CHECK(first.dump() == second.dump());
  }
}
