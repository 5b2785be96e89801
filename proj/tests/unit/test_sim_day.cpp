#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "phasecast/sim/invariants.hpp"
#include "phasecast/sim/simulator.hpp"

using namespace phasecast;
using namespace phasecast::sim;

namespace {

IntersectionConfig reference() {
  return load_intersection_config(std::string(PHASECAST_CONFIG_DIR) +
                                  "/reference-intersection.cfg");
}

constexpr UnixSeconds kDate = 1567382400;  // 2019-09-02

}  // namespace

TEST_CASE("a full operating span yields 57,600 records before corruption") {
  IntersectionConfig cfg = reference();
  long long count = 0;
  UnixSeconds first = 0, last = 0;
  simulate_day(cfg, kDate, 7, [&](const PerSecondRecord& r) {
    if (count == 0) first = r.timestamp;
    last = r.timestamp;
    ++count;
  });
  CHECK(count == 57600);
  CHECK(first == kDate + cfg.span_start);
  CHECK(last == kDate + cfg.span_end - 1);
}

TEST_CASE("identical (config, date, seed) produce bit-identical streams") {
  IntersectionConfig cfg = reference();
  cfg.span_start = parse_time_of_day("06:00");
  cfg.span_end = parse_time_of_day("07:00");
  std::string a, b;
  simulate_day(cfg, kDate, 42, [&](const PerSecondRecord& r) { a += r.to_json_line(); a += '\n'; });
  simulate_day(cfg, kDate, 42, [&](const PerSecondRecord& r) { b += r.to_json_line(); b += '\n'; });
  CHECK(a == b);
}

TEST_CASE("different seeds differ in detector fields but both satisfy the invariants") {
  IntersectionConfig cfg = reference();
  cfg.span_start = parse_time_of_day("06:00");
  cfg.span_end = parse_time_of_day("08:00");

  std::string streams[2];
  for (int k = 0; k < 2; ++k) {
    InvariantChecker checker(cfg);
    simulate_day(cfg, kDate, 100 + static_cast<std::uint64_t>(k), [&](const PerSecondRecord& r) {
      checker.observe(r);
      streams[k] += r.to_json_line();
      streams[k] += '\n';
    });
    checker.finish();
    INFO((checker.violations().empty() ? "" : checker.violations().front()));
    CHECK(checker.violations().empty());
  }
  CHECK(streams[0] != streams[1]);
}

TEST_CASE("corrupt_feed identity and total-drop edge cases") {
  IntersectionConfig cfg = reference();
  cfg.span_start = parse_time_of_day("06:00");
  cfg.span_end = parse_time_of_day("06:10");
  auto records = simulate_day(cfg, kDate, 3);

  auto same = corrupt_feed(records, 0.0, 0.0, 99);
  REQUIRE(same.size() == records.size());
  for (std::size_t i = 0; i < same.size(); ++i) {
    CHECK(same[i].timestamp == records[i].timestamp);
  }
  CHECK(corrupt_feed(records, 1.0, 0.0, 99).empty());
}

TEST_CASE("10% dropout keeps the surviving count within 3 sigma of the mean") {
  // Binomial bound on 57,600 trials at p = 0.9: sigma = sqrt(n p (1-p)) ~ 72.
  IntersectionConfig cfg = reference();
  long long survivors = 0;
  FeedCorruptor corruptor(0.10, 0.0, 2024);
  const long long n = 57600;
  for (long long i = 0; i < n; ++i) survivors += corruptor.copies_for_next();
  const double mean = 0.9 * static_cast<double>(n);
  const double sigma = std::sqrt(static_cast<double>(n) * 0.9 * 0.1);
  CHECK(std::abs(static_cast<double>(survivors) - mean) <= 3.0 * sigma);
}

TEST_CASE("duplicates are adjacent with identical payloads; order preserved") {
  IntersectionConfig cfg = reference();
  cfg.span_start = parse_time_of_day("06:00");
  cfg.span_end = parse_time_of_day("06:30");
  auto records = simulate_day(cfg, kDate, 5);
  auto corrupted = corrupt_feed(records, 0.0, 0.5, 5);
  CHECK(corrupted.size() > records.size());
  for (std::size_t i = 1; i < corrupted.size(); ++i) {
    CHECK(corrupted[i].timestamp >= corrupted[i - 1].timestamp);
    if (corrupted[i].timestamp == corrupted[i - 1].timestamp) {
      CHECK(corrupted[i].to_json_line() == corrupted[i - 1].to_json_line());
    }
  }
}

TEST_CASE("plan transitions: invariants hold across the 10:00 and 15:00 switches") {
  IntersectionConfig cfg = reference();
  cfg.span_start = parse_time_of_day("09:50");
  cfg.span_end = parse_time_of_day("15:20");
  InvariantChecker checker(cfg);
  int plans_seen = 0;
  int prev_plan = -1;
  simulate_day(cfg, kDate, 11, [&](const PerSecondRecord& r) {
    checker.observe(r);
    if (r.plan_id != prev_plan) {
      ++plans_seen;
      prev_plan = r.plan_id;
    }
  });
  checker.finish();
  INFO((checker.violations().empty() ? "" : checker.violations().front()));
  CHECK(checker.violations().empty());
  CHECK(plans_seen == 3);
}
