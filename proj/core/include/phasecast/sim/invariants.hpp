#ifndef PHASECAST_SIM_INVARIANTS_HPP_
#define PHASECAST_SIM_INVARIANTS_HPP_

#include <string>
#include <vector>

#include "phasecast/sim/config.hpp"
#include "phasecast/sim/record.hpp"

namespace phasecast::sim {

/// Streaming verifier of the controller contracts, driven record by record:
///  - at most one green phase per ring, greens confined to one barrier group;
///  - completed non-coordinated greens respect min/max green;
///  - force-off to force-off distance of a coordinated phase equals the plan
///    cycle length (cycles spanning a plan change are not compared);
///  - walk + flashing always displayed inside the vehicle phase's green;
///  - a phase with no latched call and no actuation over a full cycle shows
///    no green that cycle.
class InvariantChecker {
 public:
  explicit InvariantChecker(const IntersectionConfig& config);

  void observe(const PerSecondRecord& record);
  void finish();

  const std::vector<std::string>& violations() const { return violations_; }
  long long ticks() const { return ticks_; }

 private:
  struct PhaseTrack {
    bool green = false;
    bool prev_green = false;
    int green_run = 0;
    bool run_started_in_stream = false;
    bool latched_call = false;
    bool any_call_or_actuation_this_cycle = false;
    int green_starts_this_cycle = 0;
    UnixSeconds last_force_off = -1;
    int plan_changes_since_force_off = 0;
  };

  void report(UnixSeconds t, const std::string& msg);

  const IntersectionConfig& config_;
  std::vector<std::string> violations_;
  std::map<int, PhaseTrack> tracks_;
  std::map<int, bool> prev_actuated_;
  int prev_plan_id_ = -1;
  int prev_cycle_second_ = -1;
  long long ticks_ = 0;
  bool saw_cycle_boundary_ = false;
};

}  // namespace phasecast::sim

#endif  // PHASECAST_SIM_INVARIANTS_HPP_
