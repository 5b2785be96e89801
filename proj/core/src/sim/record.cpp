#include "phasecast/sim/record.hpp"

#include <json.hpp>

namespace phasecast::sim {

const char* to_string(SignalState s) {
  switch (s) {
    case SignalState::kGreen: return "green";
    case SignalState::kYellow: return "yellow";
    case SignalState::kRed: return "red";
  }
  return "?";
}

const char* to_string(ExitMode m) {
  switch (m) {
    case ExitMode::kNone: return "none";
    case ExitMode::kGapOut: return "gap-out";
    case ExitMode::kMaxOut: return "max-out";
    case ExitMode::kForceOff: return "force-off";
    case ExitMode::kSkip: return "skip";
  }
  return "?";
}

const char* to_string(PedState s) {
  switch (s) {
    case PedState::kWalk: return "walk";
    case PedState::kFlashing: return "flashing";
    case PedState::kDontWalk: return "dont-walk";
  }
  return "?";
}

std::string PerSecondRecord::to_json_line() const {
  // Field names here are the stable contract consumed by the ingest stage;
  // see docs/record-schema.md before changing anything.
  nlohmann::ordered_json j;
  j["timestamp"] = timestamp;
  nlohmann::ordered_json plan;
  plan["plan_id"] = plan_id;
  plan["cycle_length"] = cycle_length;
  plan["offset"] = offset;
  plan["cycle_second"] = cycle_second;
  j["signal"]["plan"] = plan;
  for (const auto& [id, snap] : phases) {
    nlohmann::ordered_json p;
    p["state"] = to_string(snap.state);
    p["exit_mode"] = to_string(snap.exit_mode);
    j["signal"]["phases"][std::to_string(id)] = p;
  }
  for (const auto& [id, snap] : peds) {
    nlohmann::ordered_json p;
    p["state"] = to_string(snap.state);
    p["call"] = snap.call ? 1 : 0;
    j["signal"]["peds"][std::to_string(id)] = p;
  }
  for (const auto& [id, snap] : detectors) {
    nlohmann::ordered_json d;
    d["actuation"] = snap.actuation;
    d["volume"] = snap.volume;
    d["occupancy"] = snap.occupancy;
    d["speed"] = snap.speed;
    j["detectors"][std::to_string(id)] = d;
  }
  return j.dump();
}

}  // namespace phasecast::sim
