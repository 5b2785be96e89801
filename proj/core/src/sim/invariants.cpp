#include "phasecast/sim/invariants.hpp"

#include <set>

namespace phasecast::sim {

InvariantChecker::InvariantChecker(const IntersectionConfig& config) : config_(config) {
  for (const auto& p : config.phases) tracks_[p.id] = PhaseTrack{};
}

void InvariantChecker::report(UnixSeconds t, const std::string& msg) {
  if (violations_.size() < 200) {
    violations_.push_back("t=" + std::to_string(t) + ": " + msg);
  }
}

void InvariantChecker::observe(const PerSecondRecord& record) {
  ++ticks_;
  const UnixSeconds t = record.timestamp;
  const bool plan_changed = prev_plan_id_ != -1 && record.plan_id != prev_plan_id_;

  // One green per ring; all greens in one barrier group.
  std::map<int, int> greens_per_ring;
  std::set<int> green_groups;
  for (const auto& [id, snap] : record.phases) {
    if (snap.state == SignalState::kGreen) {
      const auto& p = config_.phase(id);
      if (++greens_per_ring[p.ring] > 1) {
        report(t, "ring " + std::to_string(p.ring) + " shows two greens");
      }
      green_groups.insert(p.barrier_group);
    }
  }
  if (green_groups.size() > 1) report(t, "green phases span barrier groups");

  // Per-phase actuation aggregated from owned detectors.
  std::map<int, bool> actuated;
  for (const auto& d : config_.detectors) {
    auto it = record.detectors.find(d.id);
    if (it != record.detectors.end() && it->second.actuation) actuated[d.phase] = true;
  }

  const bool cycle_boundary = record.cycle_second == 0 && prev_cycle_second_ != 0;

  for (const auto& [id, snap] : record.phases) {
    const auto& p = config_.phase(id);
    PhaseTrack& track = tracks_[id];
    track.prev_green = track.green;
    track.green = snap.state == SignalState::kGreen;

    if (plan_changed) ++track.plan_changes_since_force_off;

    // Close out the previous cycle before accumulating this tick. The skip
    // property is about service initiation: a green run belongs to the cycle
    // it started in (floating green may carry a run across the boundary).
    if (cycle_boundary) {
      if (saw_cycle_boundary_ && !p.coordinated && track.green_starts_this_cycle > 0 &&
          !track.any_call_or_actuation_this_cycle) {
        report(t, "phase " + std::to_string(id) + " served in a cycle with no calls");
      }
      track.green_starts_this_cycle = 0;
      track.any_call_or_actuation_this_cycle = track.latched_call;
    }

    // Completed green runs: min/max green for non-coordinated phases.
    if (track.green) {
      if (!track.prev_green) {
        track.green_run = 0;
        track.run_started_in_stream = ticks_ > 1;
        ++track.green_starts_this_cycle;
      }
      ++track.green_run;
      if (!p.coordinated && track.green_run > p.max_green) {
        report(t, "phase " + std::to_string(id) + " green beyond max_green");
      }
    } else if (track.prev_green && track.run_started_in_stream && !p.coordinated) {
      if (track.green_run < p.min_green) {
        report(t, "phase " + std::to_string(id) + " green run " +
                      std::to_string(track.green_run) + " below min_green");
      }
    }

    // Coordination: distance between force-off events of a coordinated phase.
    if (p.coordinated && snap.state == SignalState::kYellow && track.prev_green &&
        snap.exit_mode == ExitMode::kForceOff) {
      if (track.last_force_off >= 0 && track.plan_changes_since_force_off == 0) {
        const long long gap = t - track.last_force_off;
        if (gap != record.cycle_length) {
          report(t, "phase " + std::to_string(id) + " cycle length " + std::to_string(gap) +
                        " != plan " + std::to_string(record.cycle_length));
        }
      }
      track.last_force_off = t;
      track.plan_changes_since_force_off = 0;
    }

    // Walk and flashing must sit inside the vehicle green.
    auto ped = record.peds.find(id);
    if (ped != record.peds.end() && ped->second.state != PedState::kDontWalk && !track.green) {
      report(t, "ped interval outside green of phase " + std::to_string(id));
    }

    // Call bookkeeping for the skip property, mirroring the controller: it
    // consumes detector outputs with a one-second delay, so an actuation
    // latches at the NEXT tick if the phase is not green then.
    bool any_call = false;
    if (actuated.count(id)) any_call = true;
    if (prev_actuated_.count(id) && prev_actuated_.at(id) && !track.green) {
      track.latched_call = true;
      any_call = true;
    }
    if (ped != record.peds.end() && ped->second.call) any_call = true;
    if (track.green) track.latched_call = false;
    if (any_call || track.latched_call) track.any_call_or_actuation_this_cycle = true;
    prev_actuated_[id] = actuated.count(id) > 0;
  }

  if (cycle_boundary) saw_cycle_boundary_ = true;
  prev_plan_id_ = record.plan_id;
  prev_cycle_second_ = record.cycle_second;
}

void InvariantChecker::finish() {
  // Nothing extra: truncated runs at stream edges are intentionally ignored.
}

}  // namespace phasecast::sim
