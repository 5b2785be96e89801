#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "phasecast/sim/config.hpp"

using namespace phasecast;
using namespace phasecast::sim;

namespace {

IntersectionConfig reference() {
  return load_intersection_config(std::string(PHASECAST_CONFIG_DIR) +
                                  "/reference-intersection.cfg");
}

}  // namespace

TEST_CASE("reference config loads and matches the documented topology") {
  IntersectionConfig cfg = reference();
  CHECK(cfg.phases.size() == 6);
  CHECK(cfg.detectors.size() == 18);
  CHECK(cfg.ped_phases.size() == 3);
  CHECK(cfg.tod_schedule.size() == 3);
  for (int p : {1, 2, 3, 4}) CHECK(cfg.phase(p).ring == 1);
  for (int p : {5, 6}) CHECK(cfg.phase(p).ring == 2);
  for (int p : {1, 2, 5, 6}) CHECK(cfg.phase(p).barrier_group == 1);
  for (int p : {3, 4}) CHECK(cfg.phase(p).barrier_group == 2);
  CHECK(cfg.phase(2).coordinated);
  CHECK(cfg.phase(6).coordinated);
  CHECK_FALSE(cfg.phase(1).coordinated);
  CHECK(cfg.span_end - cfg.span_start == 57600);
}

TEST_CASE("build_plan picks the latest entry with start <= t") {
  IntersectionConfig cfg = reference();
  CHECK(build_plan(cfg, parse_time_of_day("06:00")).plan_id == 1);  // boundary inclusive
  CHECK(build_plan(cfg, parse_time_of_day("09:59:59")).plan_id == 1);
  CHECK(build_plan(cfg, parse_time_of_day("10:00")).plan_id == 2);
  CHECK(build_plan(cfg, parse_time_of_day("15:00")).plan_id == 3);
  CHECK(build_plan(cfg, parse_time_of_day("23:59")).plan_id == 3);
  CHECK_THROWS_AS(build_plan(cfg, 0), UncoveredTimeError);  // before first entry
  CHECK_THROWS_AS(build_plan(cfg, -5), UncoveredTimeError);
  CHECK_THROWS_AS(build_plan(cfg, 86400), UncoveredTimeError);
}

TEST_CASE("validation rejects broken configs") {
  const std::string base = std::string(PHASECAST_CONFIG_DIR) + "/reference-intersection.cfg";
  IntersectionConfig cfg = load_intersection_config(base);

  SUBCASE("min_green above max_green") {
    cfg.phases[0].min_green = cfg.phases[0].max_green + 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
  SUBCASE("two coordinated phases on one ring") {
    for (auto& p : cfg.phases) {
      if (p.id == 1) p.coordinated = true;
    }
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
  SUBCASE("splits that do not tile the cycle") {
    cfg.tod_schedule[0].plan.splits[1] += 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
  SUBCASE("rings disagreeing on the group window") {
    cfg.tod_schedule[0].plan.splits[5] += 1;
    cfg.tod_schedule[0].plan.splits[6] -= 1;
    CHECK_NOTHROW(cfg.validate());  // still equal totals
    cfg.tod_schedule[0].plan.splits[6] -= 1;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
  SUBCASE("split too small for walk + flashing + clearance") {
    cfg.tod_schedule[0].plan.splits[4] = 20;
    cfg.tod_schedule[0].plan.splits[3] = 30;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
  SUBCASE("schedule must cover the span start") {
    cfg.tod_schedule.erase(cfg.tod_schedule.begin());
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
  SUBCASE("corruption probabilities bounded") {
    cfg.corruption.dropout_prob = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }
}

TEST_CASE("rate profiles hold their latest value") {
  RateProfile p;
  p.points = {{21600, 0.5}, {36000, 0.2}};
  CHECK(p.at(21600) == 0.5);
  CHECK(p.at(35999) == 0.5);
  CHECK(p.at(36000) == 0.2);
  CHECK(p.at(80000) == 0.2);
  CHECK(p.at(0) == 0.5);  // first entry extends backwards
}
