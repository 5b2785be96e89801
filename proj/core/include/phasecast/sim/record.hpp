#ifndef PHASECAST_SIM_RECORD_HPP_
#define PHASECAST_SIM_RECORD_HPP_

#include <map>
#include <string>

#include "phasecast/util/time.hpp"

namespace phasecast::sim {

enum class SignalState { kGreen, kYellow, kRed };
enum class ExitMode { kNone, kGapOut, kMaxOut, kForceOff, kSkip };
enum class PedState { kWalk, kFlashing, kDontWalk };

const char* to_string(SignalState s);
const char* to_string(ExitMode m);
const char* to_string(PedState s);

struct PhaseSnapshot {
  SignalState state = SignalState::kRed;
  ExitMode exit_mode = ExitMode::kNone;
};

struct PedSnapshot {
  PedState state = PedState::kDontWalk;
  bool call = false;
};

struct DetectorSnapshot {
  int actuation = 0;       // presence this second (0/1)
  int volume = 0;          // stop-bar crossings this second
  double occupancy = 0.0;  // fraction of the second occupied, [0,1]
  double speed = 0.0;      // m/s at the detector
};

/// One second of intersection telemetry; the wire unit of the feed.
struct PerSecondRecord {
  UnixSeconds timestamp = 0;
  std::map<int, PhaseSnapshot> phases;
  std::map<int, PedSnapshot> peds;        // keyed by vehicle phase
  std::map<int, DetectorSnapshot> detectors;
  int plan_id = 0;
  int cycle_length = 0;
  int offset = 0;
  int cycle_second = 0;

  /// One self-describing JSON object, single line, no trailing newline.
  std::string to_json_line() const;
};

}  // namespace phasecast::sim

#endif  // PHASECAST_SIM_RECORD_HPP_
