#ifndef PHASECAST_SIM_CONTROLLER_HPP_
#define PHASECAST_SIM_CONTROLLER_HPP_

#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "phasecast/sim/config.hpp"
#include "phasecast/sim/record.hpp"

namespace phasecast::sim {

/// Thrown when a tick would put two barrier groups in green simultaneously.
/// This signals an engine bug, not bad input; the simulation must abort.
struct InvariantViolationError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Coordinated-actuated ring-barrier controller, 1 s resolution.
///
/// Semantics (docs/controller-semantics.md has the full walk-through):
///  - every phase has a fixed force-off point in cycle time derived from the
///    active plan's splits; coordinated phases always run green to force-off;
///  - actuated phases need a latched call to be served, gap out when no
///    actuation arrives within the gap extension after min green, max out at
///    max green, and are force-off bound at their split point;
///  - time surrendered by skips and early gap-outs floats forward and is
///    absorbed by the coordinated phase of the ring;
///  - rings cross barriers together; a serviceable call anywhere in the
///    active group holds the crossing;
///  - a served pedestrian phase pins its vehicle phase green through
///    walk + flashing clearance.
class RingBarrierController {
 public:
  struct Inputs {
    /// Aggregated per-phase detector presence from the previous second.
    std::set<PhaseId> actuations;
    /// Pedestrian call button events this second (vehicle-phase keyed).
    std::set<PhaseId> ped_call_events;
  };

  using Output = PerSecondRecord;  // detector fields left empty here

  RingBarrierController(const IntersectionConfig& config, UnixSeconds start_time);

  /// Advance exactly one second and return the indications displayed during
  /// that second. `now` must advance by 1 between calls.
  Output tick(UnixSeconds now, const Inputs& inputs);

  int cycle_second() const { return cycle_second_; }
  const PlanConfig& plan() const { return *plan_; }

  /// Seconds of green the active phase of `ring` has displayed so far
  /// (0 when the ring is not green). Exposed for tests.
  int elapsed_green(int ring) const;

 private:
  enum class Mode { kGreen, kYellow, kAllRed, kWaiting };

  struct RingState {
    int ring_id = 0;
    Mode mode = Mode::kWaiting;
    PhaseId phase = 0;       // valid unless kWaiting
    int elapsed = 0;         // seconds already displayed in current mode
    int gap_timer = 0;       // seconds since last actuation while green
    std::size_t seq_pos = 0; // next sequence index to consider in the group
    // A force-off that arrived before min green or during a walk/flashing
    // interval (possible across plan transitions) stays armed until it may
    // legally fire.
    bool force_off_pending = false;
  };

  struct PedMachine {
    PedState state = PedState::kDontWalk;
    int elapsed = 0;
  };

  void adopt_plan(const PlanConfig& plan, UnixSeconds now);
  void compute_force_offs();
  bool serviceable(const RingState& ring, std::size_t pos) const;
  bool has_call(PhaseId id) const;
  int time_to_force_off(PhaseId id) const;
  void start_green(RingState& ring, std::size_t pos);
  void check_green_invariants() const;

  const IntersectionConfig& config_;
  const PlanConfig* plan_ = nullptr;
  std::vector<int> groups_;                    // barrier group ids, service order
  std::size_t group_idx_ = 0;                  // index into groups_
  std::map<int, std::vector<PhaseId>> sequences_;  // (ring,group) -> phases; key = ring*64+group
  std::vector<RingState> rings_;
  std::map<PhaseId, int> force_off_;           // cycle second ending green
  std::map<PhaseId, ExitMode> exit_mode_;
  std::map<PhaseId, PedMachine> peds_;
  std::set<PhaseId> calls_;
  std::set<PhaseId> ped_calls_;
  int cycle_second_ = 0;
  bool first_tick_ = true;
};

}  // namespace phasecast::sim

#endif  // PHASECAST_SIM_CONTROLLER_HPP_
