#ifndef PHASECAST_SIM_TRAFFIC_HPP_
#define PHASECAST_SIM_TRAFFIC_HPP_

#include <map>
#include <set>
#include <vector>

#include "phasecast/sim/config.hpp"
#include "phasecast/sim/record.hpp"
#include "phasecast/util/rng.hpp"

namespace phasecast::sim {

/// Macroscopic per-lane queue model feeding the stop-bar detectors.
/// Queues carry a fractional vehicle accumulator: discharge subtracts
/// saturation flow directly and crossings accumulate until a whole vehicle
/// is counted as volume.
class TrafficModel {
 public:
  explicit TrafficModel(const IntersectionConfig& config);

  struct LaneState {
    double queue = 0.0;      // vehicles waiting (fractional)
    double cross_acc = 0.0;  // fractional crossings pending a volume count
  };

  /// Advance one second. `green` holds the phases showing green this second.
  /// Returns one snapshot per detector id.
  std::map<int, DetectorSnapshot> step(int tod, const std::set<PhaseId>& green, Rng& rng);

  /// Phases whose detectors reported presence this second (input for the
  /// next controller tick).
  std::set<PhaseId> actuated_phases(const std::map<int, DetectorSnapshot>& snapshots) const;

  const LaneState& lane(int detector_id) const { return lanes_.at(detector_id); }
  LaneState& mutable_lane(int detector_id) { return lanes_.at(detector_id); }

 private:
  const IntersectionConfig& config_;
  std::map<int, LaneState> lanes_;            // keyed by detector id (one per lane)
  std::map<int, double> demand_fraction_;     // detector id -> share of approach demand
};

}  // namespace phasecast::sim

#endif  // PHASECAST_SIM_TRAFFIC_HPP_
