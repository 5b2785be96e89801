#include "phasecast/sim/traffic.hpp"

#include <algorithm>
#include <cmath>

namespace phasecast::sim {

namespace {
// A free-flowing vehicle covers the stop-bar loop for roughly this fraction
// of a second; queued vehicles occupy it continuously.
constexpr double kPassOccupancy = 0.3;
}  // namespace

TrafficModel::TrafficModel(const IntersectionConfig& config) : config_(config) {
  std::map<std::string, double> share_total;
  for (const auto& d : config.detectors) {
    lanes_[d.id] = LaneState{};
    share_total[d.approach] += d.share;
  }
  for (const auto& d : config.detectors) {
    demand_fraction_[d.id] = d.share / share_total.at(d.approach);
  }
}

std::map<int, DetectorSnapshot> TrafficModel::step(int tod, const std::set<PhaseId>& green,
                                                   Rng& rng) {
  std::map<int, DetectorSnapshot> out;
  // Detector order is fixed so the rng stream is reproducible.
  for (const auto& d : config_.detectors) {
    LaneState& lane = lanes_[d.id];
    const double rate = config_.arrivals.at(d.approach).at(tod) * demand_fraction_.at(d.id);
    const int arrivals = rng.poisson(rate);
    const bool is_green = green.count(d.phase) > 0;

    double crossings = 0.0;
    if (lane.queue > 0.0) {
      if (is_green) {
        const double discharge = std::min(lane.queue, config_.saturation_flow);
        lane.queue -= discharge;
        crossings += discharge;
      }
      lane.queue += arrivals;  // arrivals join the back of a standing queue
    } else if (is_green) {
      crossings += arrivals;   // free flow straight across the stop bar
    } else {
      lane.queue += arrivals;
    }

    lane.cross_acc += crossings;
    DetectorSnapshot snap;
    snap.volume = static_cast<int>(std::floor(lane.cross_acc));
    lane.cross_acc -= snap.volume;

    const bool queued = lane.queue > 0.0;
    snap.actuation = (queued || crossings > 0.0) ? 1 : 0;
    if (queued) {
      snap.occupancy = 1.0;
      snap.speed = 0.0;
    } else if (crossings > 0.0) {
      snap.occupancy = std::min(1.0, crossings * kPassOccupancy);
      auto speed = config_.free_speed.find(d.approach);
      snap.speed = speed != config_.free_speed.end() ? speed->second : 15.0;
    }
    out[d.id] = snap;
  }
  return out;
}

std::set<PhaseId> TrafficModel::actuated_phases(
    const std::map<int, DetectorSnapshot>& snapshots) const {
  std::set<PhaseId> phases;
  for (const auto& d : config_.detectors) {
    auto it = snapshots.find(d.id);
    if (it != snapshots.end() && it->second.actuation) phases.insert(d.phase);
  }
  return phases;
}

}  // namespace phasecast::sim
