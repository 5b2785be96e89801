#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>
#include <vector>

#include <functional>

#include "phasecast/sim/controller.hpp"
#include "phasecast/util/rng.hpp"

using namespace phasecast;
using namespace phasecast::sim;

namespace {

// Minimal two-ring, two-barrier-group intersection with a 40 s cycle.
// Force-offs land at cycle seconds 9 (1/5), 22 (2/6), 30 (3), 37 (4).
const char* kTinyConfig = R"(
name = tiny
span.start = 06:00
span.end = 07:00
saturation_flow = 0.5
phase.1.ring = 1
phase.1.barrier_group = 1
phase.1.min_green = 3
phase.1.max_green = 8
phase.1.yellow = 2
phase.1.all_red = 1
phase.1.gap_extension = 2
phase.2.ring = 1
phase.2.barrier_group = 1
phase.2.min_green = 3
phase.2.max_green = 90
phase.2.yellow = 2
phase.2.all_red = 1
phase.2.gap_extension = 2
phase.2.coordinated = true
phase.3.ring = 1
phase.3.barrier_group = 2
phase.3.min_green = 3
phase.3.max_green = 6
phase.3.yellow = 2
phase.3.all_red = 1
phase.3.gap_extension = 2
phase.4.ring = 1
phase.4.barrier_group = 2
phase.4.min_green = 3
phase.4.max_green = 6
phase.4.yellow = 2
phase.4.all_red = 1
phase.4.gap_extension = 2
phase.5.ring = 2
phase.5.barrier_group = 1
phase.5.min_green = 3
phase.5.max_green = 8
phase.5.yellow = 2
phase.5.all_red = 1
phase.5.gap_extension = 2
phase.6.ring = 2
phase.6.barrier_group = 1
phase.6.min_green = 3
phase.6.max_green = 90
phase.6.yellow = 2
phase.6.all_red = 1
phase.6.gap_extension = 2
phase.6.coordinated = true
detector.1.approach = X
detector.1.phase = 1
detector.2.approach = X
detector.2.phase = 2
detector.3.approach = X
detector.3.phase = 3
detector.4.approach = X
detector.4.phase = 4
detector.5.approach = X
detector.5.phase = 5
detector.6.approach = X
detector.6.phase = 6
plan.1.start = 00:00
plan.1.cycle = 40
plan.1.offset = 0
plan.1.split.1 = 12
plan.1.split.2 = 13
plan.1.split.3 = 8
plan.1.split.4 = 7
plan.1.split.5 = 12
plan.1.split.6 = 13
arrival.X = 00:00 0.0
)";

// 06:00 on an arbitrary date; 21600 % 40 == 0 so the run starts at cycle
// second 0.
constexpr UnixSeconds kStart = 1567382400 + 21600;

struct Trace {
  std::vector<PerSecondRecord> records;

  SignalState state(int t, int phase) const { return records[t].phases.at(phase).state; }
  ExitMode exit_mode(int t, int phase) const { return records[t].phases.at(phase).exit_mode; }

  // Length of the green run that starts at tick t (must be a run start).
  int green_run_from(int t, int phase) const {
    int n = 0;
    while (t + n < static_cast<int>(records.size()) &&
           state(t + n, phase) == SignalState::kGreen) {
      ++n;
    }
    return n;
  }
};

Trace run(const IntersectionConfig& config, int ticks,
          const std::function<RingBarrierController::Inputs(int)>& inputs_at) {
  RingBarrierController controller(config, kStart);
  Trace trace;
  for (int t = 0; t < ticks; ++t) {
    trace.records.push_back(controller.tick(kStart + t, inputs_at(t)));
  }
  return trace;
}

}  // namespace

TEST_CASE("zero demand: only the coordinated phases cycle, period = cycle length") {
  auto config = parse_intersection_config(kTinyConfig);
  Trace trace = run(config, 200, [](int) { return RingBarrierController::Inputs{}; });

  // Hand-derived: green 0..21, yellow 22..23, red 24..25, then green 26..61
  // wrapping each 40 s cycle thereafter.
  for (int t = 0; t <= 21; ++t) {
    CHECK(trace.state(t, 2) == SignalState::kGreen);
    CHECK(trace.state(t, 6) == SignalState::kGreen);
  }
  CHECK(trace.state(22, 2) == SignalState::kYellow);
  CHECK(trace.state(23, 2) == SignalState::kYellow);
  CHECK(trace.exit_mode(22, 2) == ExitMode::kForceOff);
  CHECK(trace.state(24, 2) == SignalState::kRed);
  CHECK(trace.state(25, 2) == SignalState::kRed);
  CHECK(trace.state(26, 2) == SignalState::kGreen);
  CHECK(trace.green_run_from(26, 2) == 36);
  CHECK(trace.state(66, 2) == SignalState::kGreen);  // period 40 from t=26

  // Never-green phases, each eventually marked skipped.
  for (int t = 0; t < 200; ++t) {
    for (int p : {1, 3, 4, 5}) {
      CHECK(trace.state(t, p) == SignalState::kRed);
    }
  }
  CHECK(trace.exit_mode(0, 1) == ExitMode::kSkip);
  CHECK(trace.exit_mode(0, 5) == ExitMode::kSkip);
  CHECK(trace.exit_mode(26, 3) == ExitMode::kSkip);
  CHECK(trace.exit_mode(26, 4) == ExitMode::kSkip);

  // cycle_second pattern has period cycle_length.
  for (int t = 0; t + 40 < 200; ++t) {
    CHECK(trace.records[t].cycle_second == trace.records[t + 40].cycle_second);
  }
}

TEST_CASE("continuous actuation on phase 1: green exactly max_green, exit max-out") {
  auto config = parse_intersection_config(kTinyConfig);
  Trace trace = run(config, 200, [](int) {
    RingBarrierController::Inputs in;
    in.actuations.insert(1);
    return in;
  });

  // Hand-derived first cycle: 1 green 0..7 (8 s = max), yellow 8..9, all-red
  // 10, then 2 green 11..21.
  CHECK(trace.green_run_from(0, 1) == 8);
  CHECK(trace.exit_mode(8, 1) == ExitMode::kMaxOut);
  CHECK(trace.state(8, 1) == SignalState::kYellow);
  CHECK(trace.state(10, 1) == SignalState::kRed);
  CHECK(trace.state(11, 2) == SignalState::kGreen);
  CHECK(trace.green_run_from(11, 2) == 11);
  CHECK(trace.exit_mode(22, 2) == ExitMode::kForceOff);

  // Steady state: early return to phase 1 at cycle second 26, again maxing
  // out at exactly 8 s; coordinated 2 still ends at its force-off each cycle.
  CHECK(trace.state(26, 1) == SignalState::kGreen);
  CHECK(trace.green_run_from(26, 1) == 8);
  CHECK(trace.exit_mode(34, 1) == ExitMode::kMaxOut);
  CHECK(trace.state(37, 2) == SignalState::kGreen);
  CHECK(trace.green_run_from(37, 2) == 25);

  // Every completed green run of phase 1 is exactly max_green.
  int t = 0;
  int runs = 0;
  while (t < 190) {
    if (trace.state(t, 1) == SignalState::kGreen &&
        (t == 0 || trace.state(t - 1, 1) != SignalState::kGreen)) {
      int len = trace.green_run_from(t, 1);
      if (t + len < 190) {
        CHECK(len == 8);
        ++runs;
      }
      t += len;
    } else {
      ++t;
    }
  }
  CHECK(runs >= 4);
  for (int tick = 0; tick < 200; ++tick) {
    CHECK(trace.state(tick, 3) == SignalState::kRed);
    CHECK(trace.state(tick, 4) == SignalState::kRed);
  }
}

TEST_CASE("single call gaps out after min_green + gap_extension") {
  auto config = parse_intersection_config(kTinyConfig);
  Trace trace = run(config, 80, [](int t) {
    RingBarrierController::Inputs in;
    if (t == 0) in.actuations.insert(1);  // one car, then silence
    return in;
  });
  // Green from t=0, no further actuation: gap-out at min(3) + gap(2) = 5 s.
  CHECK(trace.state(0, 1) == SignalState::kGreen);
  CHECK(trace.green_run_from(0, 1) == 5);
  CHECK(trace.exit_mode(5, 1) == ExitMode::kGapOut);
  // Surrendered time floats to the coordinated phase: 2 green 8..21.
  CHECK(trace.state(8, 2) == SignalState::kGreen);
  CHECK(trace.green_run_from(8, 2) == 14);
}

TEST_CASE("side-street call is served inside its window and force-off holds the cycle") {
  auto config = parse_intersection_config(kTinyConfig);
  // Continuous demand on phase 3 only.
  Trace trace = run(config, 200, [](int) {
    RingBarrierController::Inputs in;
    in.actuations.insert(3);
    return in;
  });
  // Crossing into group 2 happens at cycle second 25 every cycle; 3 is
  // served green 25..29 and force-off caps it at its split point (30),
  // before max_green can bind.
  CHECK(trace.state(25, 3) == SignalState::kGreen);
  CHECK(trace.green_run_from(25, 3) == 5);
  CHECK(trace.exit_mode(30, 3) == ExitMode::kForceOff);
  // Coordinated force-offs still land every 40 s.
  CHECK(trace.exit_mode(22, 2) == ExitMode::kForceOff);
  CHECK(trace.exit_mode(62, 2) == ExitMode::kForceOff);
  CHECK(trace.state(62, 2) == SignalState::kYellow);
}

TEST_CASE("pedestrian call: walk starts with green and walk+flashing stay inside it") {
  std::string cfg_text = std::string(kTinyConfig) +
                         "ped.2.walk = 4\n"
                         "ped.2.flashing = 5\n";
  auto config = parse_intersection_config(cfg_text);
  Trace trace = run(config, 120, [](int t) {
    RingBarrierController::Inputs in;
    if (t == 1) in.ped_call_events.insert(2);  // mid-green: waits for next green
    return in;
  });
  // Phase 2 green runs 0..21 and 26..61; the call at t=1 is served at t=26.
  for (int t = 1; t <= 25; ++t) CHECK(trace.records[t].peds.at(2).call);
  CHECK_FALSE(trace.records[26].peds.at(2).call);
  for (int t = 0; t <= 25; ++t) {
    CHECK(trace.records[t].peds.at(2).state == PedState::kDontWalk);
  }
  for (int t = 26; t <= 29; ++t) CHECK(trace.records[t].peds.at(2).state == PedState::kWalk);
  for (int t = 30; t <= 34; ++t) {
    CHECK(trace.records[t].peds.at(2).state == PedState::kFlashing);
  }
  CHECK(trace.records[35].peds.at(2).state == PedState::kDontWalk);
  for (int t = 26; t <= 34; ++t) CHECK(trace.state(t, 2) == SignalState::kGreen);
}

TEST_CASE("pedestrian clearance blocks gap-out on an actuated phase") {
  // Wider group-2 window so walk + flashing + clearance fit phase 4.
  std::string cfg_text(kTinyConfig);
  auto replace = [&cfg_text](const std::string& from, const std::string& to) {
    cfg_text.replace(cfg_text.find(from), from.size(), to);
  };
  replace("plan.1.cycle = 40", "plan.1.cycle = 45");  // still divides 21600
  replace("plan.1.split.3 = 8", "plan.1.split.3 = 6");
  replace("plan.1.split.4 = 7", "plan.1.split.4 = 14");
  replace("phase.4.max_green = 6", "phase.4.max_green = 12");
  cfg_text += "ped.4.walk = 4\nped.4.flashing = 5\n";
  auto config = parse_intersection_config(cfg_text);

  Trace trace = run(config, 120, [](int t) {
    RingBarrierController::Inputs in;
    if (t == 2) {
      in.actuations.insert(4);
      in.ped_call_events.insert(4);
    }
    return in;
  });
  // Crossing into group 2 at cycle second 25; 3 has no call, 4 is served at
  // 25 with the walk. Without the ped hold it would gap out after 5 s; the
  // walk(4) + flashing(5) pin it green for 9 s.
  CHECK(trace.state(25, 4) == SignalState::kGreen);
  CHECK(trace.green_run_from(25, 4) == 9);
  CHECK(trace.exit_mode(34, 4) == ExitMode::kGapOut);
  for (int t = 25; t <= 28; ++t) CHECK(trace.records[t].peds.at(4).state == PedState::kWalk);
  for (int t = 29; t <= 33; ++t) {
    CHECK(trace.records[t].peds.at(4).state == PedState::kFlashing);
  }
  for (int t = 25; t <= 33; ++t) CHECK(trace.state(t, 4) == SignalState::kGreen);
}

TEST_CASE("green indications never span two barrier groups") {
  auto config = parse_intersection_config(kTinyConfig);
  Rng rng(5);
  Trace trace = run(config, 2000, [&rng](int) {
    RingBarrierController::Inputs in;
    for (int p : {1, 3, 4, 5}) {
      if (rng.bernoulli(0.1)) in.actuations.insert(p);
    }
    return in;
  });
  auto group_of = [&](int p) { return config.phase(p).barrier_group; };
  for (const auto& rec : trace.records) {
    std::set<int> groups;
    std::map<int, int> greens_per_ring;
    for (const auto& [id, snap] : rec.phases) {
      if (snap.state == SignalState::kGreen) {
        groups.insert(group_of(id));
        greens_per_ring[config.phase(id).ring] += 1;
      }
    }
    CHECK(groups.size() <= 1);
    for (const auto& [ring, n] : greens_per_ring) CHECK(n <= 1);
  }
}
