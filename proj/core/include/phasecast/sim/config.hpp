#ifndef PHASECAST_SIM_CONFIG_HPP_
#define PHASECAST_SIM_CONFIG_HPP_

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "phasecast/util/time.hpp"

namespace phasecast::sim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised by plan lookup when the time-of-day schedule has a gap.
struct UncoveredTimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using PhaseId = int;

struct PhaseConfig {
  PhaseId id = 0;
  int ring = 0;           // 1-based
  int barrier_group = 0;  // 1-based
  int min_green = 0;      // seconds; all interval durations are whole seconds
  int max_green = 0;
  int yellow = 0;
  int all_red = 0;
  int gap_extension = 0;
  bool coordinated = false;

  int clearance() const { return yellow + all_red; }
};

struct PedPhaseConfig {
  PhaseId vehicle_phase = 0;
  int walk = 0;
  int flashing = 0;  // pedestrian clearance
};

struct DetectorConfig {
  int id = 0;
  std::string approach;  // e.g. NB / SB / EB / WB
  int lane = 0;
  PhaseId phase = 0;   // owning phase
  double share = 1.0;  // relative weight of the approach demand on this lane
};

struct PlanConfig {
  int plan_id = 0;
  int cycle_length = 0;
  int offset = 0;
  std::map<PhaseId, int> splits;  // allotted seconds, green + clearance
};

struct TodPlanEntry {
  int start = 0;  // seconds past midnight
  PlanConfig plan;
};

/// Piecewise-constant rate profile over the day: rate of the latest entry
/// whose start is <= time-of-day applies (first entry extends backwards).
struct RateProfile {
  std::vector<std::pair<int, double>> points;  // (start second-of-day, rate per second)

  double at(int tod) const;
};

struct FeedCorruption {
  double dropout_prob = 0.0;
  double duplicate_prob = 0.0;
};

struct IntersectionConfig {
  std::string name;
  int span_start = 6 * 3600;   // operating span, seconds past midnight
  int span_end = 22 * 3600;    // exclusive
  double saturation_flow = 0.5;  // veh/s/lane
  std::vector<PhaseConfig> phases;
  std::vector<std::pair<PhaseId, PhaseId>> overlaps;
  std::map<PhaseId, PedPhaseConfig> ped_phases;  // keyed by vehicle phase
  std::vector<DetectorConfig> detectors;
  std::vector<TodPlanEntry> tod_schedule;
  std::map<std::string, RateProfile> arrivals;        // per approach, veh/s
  std::map<PhaseId, RateProfile> ped_call_rates;      // per ped vehicle-phase, calls/s
  std::map<std::string, double> free_speed;           // per approach, m/s
  FeedCorruption corruption;

  const PhaseConfig& phase(PhaseId id) const;
  bool has_phase(PhaseId id) const;

  /// Phase ids on `ring` within `group`, ascending (NEMA service order).
  std::vector<PhaseId> ring_group_sequence(int ring, int group) const;
  std::vector<int> ring_ids() const;
  std::vector<int> barrier_group_ids() const;

  /// Full structural validation; throws ConfigError with a specific message.
  void validate() const;
};

/// Latest schedule entry with start <= time_of_day; UncoveredTimeError when
/// the schedule has not started yet.
const PlanConfig& build_plan(const IntersectionConfig& config, int time_of_day);

/// Key-value config file loader (format documented in docs/config-format.md).
IntersectionConfig load_intersection_config(const std::string& path);
IntersectionConfig parse_intersection_config(const std::string& text,
                                             const std::string& origin = "<memory>");

}  // namespace phasecast::sim

#endif  // PHASECAST_SIM_CONFIG_HPP_
