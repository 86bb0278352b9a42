#include <cmath>
#include <filesystem>

#include "doctest.h"

#include "dchier/scenario.hpp"
#include "support/scenario_docs.hpp"

using namespace dchier;
using nlohmann::json;
using testing_support::planar_scenario;
using testing_support::scenario_path;

TEST_SUITE("scenario") {

TEST_CASE("axis names") {
  CHECK(parse_axis("x") == 0);
  CHECK(parse_axis("rz") == 5);
  CHECK(axis_name(4) == "ry");
  CHECK_THROWS_AS(parse_axis("w"), ConfigError);
}

TEST_CASE("planar scenario parses") {
  const Scenario s = parse_scenario(planar_scenario());
  CHECK(s.name == "planar_test");
  CHECK(s.robot.dofs() == 3);
  CHECK(s.levels.size() == 2);
  CHECK(s.interaction_level() == 1);
  CHECK(s.interaction_axes() == std::vector<Index>{0, 1});
  CHECK(s.ticks() == 400);
  CHECK(s.q0(1) == doctest::Approx(60.0 * M_PI / 180.0));
  CHECK(s.op.kind == ForceKind::Scripted);
  CHECK(s.admittance.mode == DampingMode::Fixed);
  CHECK(s.admittance.axes() == 3);
  CHECK(s.admittance.fixed_damping(2) == 30.0);
  CHECK(s.admittance.dt == s.dt);
}

TEST_CASE("unknown keys and bad values are rejected") {
  json doc = planar_scenario();
  doc["speed"] = 1;
  CHECK_THROWS_AS(parse_scenario(doc), ConfigError);

  doc = planar_scenario();
  doc["levels"][0]["bounds"][0]["kind"] = "moat";
  CHECK_THROWS_AS(parse_scenario(doc), ConfigError);

  doc = planar_scenario();
  doc["dt"] = -1;
  CHECK_THROWS_AS(parse_scenario(doc), ConfigError);

  doc = planar_scenario();
  doc["duration"] = "long";
  CHECK_THROWS_AS(parse_scenario(doc), ConfigError);

  doc = planar_scenario();
  doc["levels"][1]["tasks"].clear();
  CHECK_THROWS_AS(parse_scenario(doc), ConfigError);

  doc = planar_scenario();
  doc["robot"]["preset"] = "hexapod";
  CHECK_THROWS_AS(parse_scenario(doc), ConfigError);
}

TEST_CASE("overrides edit dotted keys") {
  json doc = planar_scenario();
  apply_override(doc, "admittance.kappa2=60");
  apply_override(doc, "levels.1.theta_deg", "45");
  apply_override(doc, "name=renamed");
  apply_override(doc, "admittance.mode=\"variable\"");
  CHECK(doc["admittance"]["kappa2"] == 60);
  CHECK(doc["levels"][1]["theta_deg"] == 45);
  CHECK(doc["name"] == "renamed");
  const Scenario s = parse_scenario(doc);
  CHECK(s.admittance.kappa2 == 60.0);
  CHECK(s.admittance.mode == DampingMode::Variable);
  CHECK(s.levels[1].theta_deg == 45.0);
  CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "levels.9.theta_deg=1"), ConfigError);
}

TEST_CASE("effective config round-trips") {
  const Scenario a = parse_scenario(planar_scenario());
  const Scenario b = parse_scenario(to_json(a));
  CHECK(b.name == a.name);
  CHECK((b.q0 - a.q0).norm() < 1e-12);
  CHECK(b.levels.size() == a.levels.size());
  CHECK(b.levels[1].theta_deg == a.levels[1].theta_deg);
  CHECK(to_json(b) == to_json(a));
}

TEST_CASE("bundled scenarios load") {
  for (const auto& entry : std::filesystem::directory_iterator(DCHIER_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const Scenario s = load_scenario(entry.path().string());
    CHECK(s.robot.dofs() == 7);
    CHECK(s.ticks() > 0);
    const Scenario again = parse_scenario(to_json(s));
    CHECK((again.q0 - s.q0).norm() < 1e-12);
    json a = to_json(again), b = to_json(s);
    a["robot"].erase("q0_deg");
    b["robot"].erase("q0_deg");
    CHECK(a == b);
  }
  CHECK_THROWS_AS(load_scenario(scenario_path("missing.json")), ConfigError);
  const Scenario s = load_scenario(scenario_path("case1_velocity_cap.json"), {"duration=2"});
  CHECK(s.ticks() == 400);
}

TEST_CASE("theta schedule") {
  ThetaSchedule t;
  t.d_s = 0.2;
  t.d_e = 0.05;
  CHECK(t.theta_deg(0.2) == doctest::Approx(45.0));
  CHECK(t.theta_deg(0.05) == doctest::Approx(10.0));
  CHECK(t.theta_deg(0.01) == doctest::Approx(10.0));
  CHECK(t.theta_deg(0.125) == doctest::Approx(22.5));
  CHECK(t.theta_deg(100.0) == 180.0);

  json doc = planar_scenario();
  doc["theta_schedule"] = {{"d_s", 0.05}, {"d_e", 0.2}};
  CHECK_THROWS_AS(parse_scenario(doc), ConfigError);
}

}
