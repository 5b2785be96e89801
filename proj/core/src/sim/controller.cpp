#include "phasecast/sim/controller.hpp"

#include <algorithm>

namespace phasecast::sim {

namespace {
constexpr int kSeqKeyStride = 64;
}

RingBarrierController::RingBarrierController(const IntersectionConfig& config,
                                             UnixSeconds start_time)
    : config_(config) {
  groups_ = config.barrier_group_ids();
  for (int ring : config.ring_ids()) {
    RingState rs;
    rs.ring_id = ring;
    rings_.push_back(rs);
    for (int group : groups_) {
      sequences_[ring * kSeqKeyStride + group] = config.ring_group_sequence(ring, group);
    }
  }
  for (const auto& p : config.phases) exit_mode_[p.id] = ExitMode::kNone;
  for (const auto& [veh, ped] : config.ped_phases) peds_[veh] = PedMachine{};

  adopt_plan(build_plan(config, time_of_day(start_time)), start_time);
  // Land in the barrier group whose window covers the starting cycle second.
  int group_start = 0;
  group_idx_ = 0;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    int window = 0;
    for (const auto& ring : rings_) {
      int total = 0;
      for (PhaseId id : sequences_[ring.ring_id * kSeqKeyStride + groups_[g]]) {
        total += plan_->splits.at(id);
      }
      window = std::max(window, total);
    }
    if (cycle_second_ < group_start + window || g + 1 == groups_.size()) {
      group_idx_ = g;
      break;
    }
    group_start += window;
  }
}

void RingBarrierController::adopt_plan(const PlanConfig& plan, UnixSeconds now) {
  plan_ = &plan;
  cycle_second_ =
      ((time_of_day(now) - plan.offset) % plan.cycle_length + plan.cycle_length) %
      plan.cycle_length;
  compute_force_offs();
}

void RingBarrierController::compute_force_offs() {
  force_off_.clear();
  // Group windows tile the cycle; within a ring each phase's window ends at
  // the cumulative split, and green must end clearance seconds earlier.
  std::map<int, int> group_window;
  for (int group : groups_) {
    int window = 0;
    for (const auto& ring : rings_) {
      int total = 0;
      for (PhaseId id : sequences_.at(ring.ring_id * kSeqKeyStride + group)) {
        total += plan_->splits.at(id);
      }
      window = std::max(window, total);
    }
    group_window[group] = window;
  }
  int group_start = 0;
  for (int group : groups_) {
    for (const auto& ring : rings_) {
      int cum = group_start;
      for (PhaseId id : sequences_.at(ring.ring_id * kSeqKeyStride + group)) {
        cum += plan_->splits.at(id);
        const auto& p = config_.phase(id);
        int fo = cum - p.clearance();
        force_off_[id] = ((fo % plan_->cycle_length) + plan_->cycle_length) % plan_->cycle_length;
      }
    }
    group_start += group_window[group];
  }
}

bool RingBarrierController::has_call(PhaseId id) const {
  if (config_.phase(id).coordinated) return true;
  return calls_.count(id) > 0 || ped_calls_.count(id) > 0;
}

int RingBarrierController::time_to_force_off(PhaseId id) const {
  int d = force_off_.at(id) - cycle_second_;
  if (d < 0) d += plan_->cycle_length;
  return d;
}

bool RingBarrierController::serviceable(const RingState& ring, std::size_t pos) const {
  const auto& seq = sequences_.at(ring.ring_id * kSeqKeyStride + groups_[group_idx_]);
  if (pos >= seq.size()) return false;
  PhaseId id = seq[pos];
  if (!has_call(id)) return false;
  return time_to_force_off(id) >= config_.phase(id).min_green;
}

void RingBarrierController::start_green(RingState& ring, std::size_t pos) {
  const auto& seq = sequences_.at(ring.ring_id * kSeqKeyStride + groups_[group_idx_]);
  // Phases passed over on the way to `pos` were skipped this cycle.
  for (std::size_t k = ring.seq_pos; k < pos; ++k) exit_mode_[seq[k]] = ExitMode::kSkip;
  PhaseId id = seq[pos];
  ring.mode = Mode::kGreen;
  ring.phase = id;
  ring.elapsed = 0;
  ring.gap_timer = 0;
  ring.force_off_pending = false;
  ring.seq_pos = pos + 1;
  exit_mode_[id] = ExitMode::kNone;
  calls_.erase(id);
  // Walk starts only together with green, and only when the whole
  // walk + flashing interval provably fits before the force-off.
  auto ped_cfg = config_.ped_phases.find(id);
  if (ped_cfg != config_.ped_phases.end() && ped_calls_.count(id) &&
      ped_cfg->second.walk + ped_cfg->second.flashing <= time_to_force_off(id)) {
    peds_[id].state = PedState::kWalk;
    peds_[id].elapsed = 0;
    ped_calls_.erase(id);
  }
}

int RingBarrierController::elapsed_green(int ring) const {
  for (const auto& rs : rings_) {
    if (rs.ring_id == ring) return rs.mode == Mode::kGreen ? rs.elapsed : 0;
  }
  return 0;
}

RingBarrierController::Output RingBarrierController::tick(UnixSeconds now, const Inputs& inputs) {
  // 1. Advance cycle time; re-evaluate the schedule at the cycle boundary.
  if (first_tick_) {
    first_tick_ = false;
  } else {
    cycle_second_ = (cycle_second_ + 1) % plan_->cycle_length;
    if (cycle_second_ == 0) {
      const PlanConfig& scheduled = build_plan(config_, time_of_day(now));
      if (scheduled.plan_id != plan_->plan_id) adopt_plan(scheduled, now);
    }
  }

  // 2. Latch calls. Actuation on a green phase extends it instead of calling.
  for (PhaseId id : inputs.actuations) {
    if (config_.phase(id).coordinated) continue;
    bool green_now = false;
    for (const auto& ring : rings_) {
      if (ring.mode == Mode::kGreen && ring.phase == id) green_now = true;
    }
    if (!green_now) calls_.insert(id);
  }
  for (PhaseId id : inputs.ped_call_events) {
    if (config_.ped_phases.count(id)) ped_calls_.insert(id);
  }

  // 3. Interval progression.
  for (auto& ring : rings_) {
    switch (ring.mode) {
      case Mode::kGreen: {
        const auto& p = config_.phase(ring.phase);
        if (inputs.actuations.count(ring.phase)) {
          ring.gap_timer = 0;
        } else {
          ++ring.gap_timer;
        }
        bool ped_hold = false;
        auto ped = peds_.find(ring.phase);
        if (ped != peds_.end() && ped->second.state != PedState::kDontWalk) ped_hold = true;

        ExitMode reason = ExitMode::kNone;
        const bool force_off_due =
            ring.force_off_pending || cycle_second_ == force_off_.at(ring.phase);
        if (force_off_due) {
          if (ring.elapsed >= p.min_green && !ped_hold) {
            reason = ExitMode::kForceOff;
          } else {
            ring.force_off_pending = true;
          }
        }
        if (reason == ExitMode::kNone && !p.coordinated && ring.elapsed >= p.max_green) {
          reason = ExitMode::kMaxOut;
        }
        if (reason == ExitMode::kNone && !p.coordinated && !ped_hold &&
            ring.elapsed >= p.min_green + p.gap_extension && ring.gap_timer >= p.gap_extension) {
          reason = ExitMode::kGapOut;
        }
        if (reason != ExitMode::kNone) {
          exit_mode_[ring.phase] = reason;
          ring.mode = Mode::kYellow;
          ring.elapsed = 0;
        }
        break;
      }
      case Mode::kYellow:
        if (ring.elapsed >= config_.phase(ring.phase).yellow) {
          ring.mode = config_.phase(ring.phase).all_red > 0 ? Mode::kAllRed : Mode::kWaiting;
          ring.elapsed = 0;
        }
        break;
      case Mode::kAllRed:
        if (ring.elapsed >= config_.phase(ring.phase).all_red) {
          ring.mode = Mode::kWaiting;
          ring.elapsed = 0;
        }
        break;
      case Mode::kWaiting:
        break;
    }
  }

  // 4. Barrier crossing: all rings idle and nothing serviceable left in the
  // active group. Both rings cross on the same tick, at most once per tick.
  bool all_waiting = std::all_of(rings_.begin(), rings_.end(),
                                 [](const RingState& r) { return r.mode == Mode::kWaiting; });
  if (all_waiting) {
    bool any_serviceable = false;
    for (const auto& ring : rings_) {
      const auto& seq = sequences_.at(ring.ring_id * kSeqKeyStride + groups_[group_idx_]);
      for (std::size_t pos = ring.seq_pos; pos < seq.size(); ++pos) {
        if (serviceable(ring, pos)) {
          any_serviceable = true;
          break;
        }
      }
    }
    if (!any_serviceable) {
      for (auto& ring : rings_) {
        const auto& seq = sequences_.at(ring.ring_id * kSeqKeyStride + groups_[group_idx_]);
        for (std::size_t k = ring.seq_pos; k < seq.size(); ++k) {
          exit_mode_[seq[k]] = ExitMode::kSkip;
        }
        ring.seq_pos = 0;
      }
      group_idx_ = (group_idx_ + 1) % groups_.size();
    }
  }

  // 5. Waiting rings pick up the next serviceable phase of the active group.
  for (auto& ring : rings_) {
    if (ring.mode != Mode::kWaiting) continue;
    const auto& seq = sequences_.at(ring.ring_id * kSeqKeyStride + groups_[group_idx_]);
    for (std::size_t pos = ring.seq_pos; pos < seq.size(); ++pos) {
      if (serviceable(ring, pos)) {
        start_green(ring, pos);
        break;
      }
    }
  }

  check_green_invariants();

  // 6. Assemble the indications displayed during this second.
  Output out;
  out.timestamp = now;
  out.plan_id = plan_->plan_id;
  out.cycle_length = plan_->cycle_length;
  out.offset = plan_->offset;
  out.cycle_second = cycle_second_;
  for (const auto& p : config_.phases) {
    PhaseSnapshot snap;
    snap.state = SignalState::kRed;
    snap.exit_mode = exit_mode_.at(p.id);
    out.phases[p.id] = snap;
  }
  for (const auto& ring : rings_) {
    if (ring.mode == Mode::kGreen) out.phases[ring.phase].state = SignalState::kGreen;
    if (ring.mode == Mode::kYellow) out.phases[ring.phase].state = SignalState::kYellow;
  }
  for (const auto& [veh, machine] : peds_) {
    PedSnapshot snap;
    snap.state = machine.state;
    snap.call = ped_calls_.count(veh) > 0;
    out.peds[veh] = snap;
  }

  // 7. Count the second just displayed.
  for (auto& ring : rings_) {
    if (ring.mode != Mode::kWaiting) ++ring.elapsed;
  }
  for (auto& [veh, machine] : peds_) {
    const auto& cfg = config_.ped_phases.at(veh);
    if (machine.state == PedState::kWalk) {
      if (++machine.elapsed >= cfg.walk) {
        machine.state = PedState::kFlashing;
        machine.elapsed = 0;
      }
    } else if (machine.state == PedState::kFlashing) {
      if (++machine.elapsed >= cfg.flashing) {
        machine.state = PedState::kDontWalk;
        machine.elapsed = 0;
      }
    }
  }
  return out;
}

void RingBarrierController::check_green_invariants() const {
  int active_group = -1;
  for (const auto& ring : rings_) {
    if (ring.mode != Mode::kGreen && ring.mode != Mode::kYellow) continue;
    int g = config_.phase(ring.phase).barrier_group;
    if (active_group == -1) {
      active_group = g;
    } else if (g != active_group) {
      throw InvariantViolationError("phases of different barrier groups active concurrently");
    }
  }
}

}  // namespace phasecast::sim
