#ifndef PHASECAST_LABEL_TARGETS_HPP_
#define PHASECAST_LABEL_TARGETS_HPP_

#include <array>
#include <vector>

#include "phasecast/ingest/day_container.hpp"
#include "phasecast/sim/record.hpp"
#include "phasecast/util/time.hpp"

namespace phasecast::label {

constexpr int kHorizonSeconds = 200;

enum class PhaseObservation { kGreen, kNotGreen, kMissing };

/// The labeling convention in one place: yellow counts as not-green, so the
/// target tracks the green/not-green boundary. Changing the convention means
/// changing this function only.
inline PhaseObservation observation_from_signal(sim::SignalState s) {
  return s == sim::SignalState::kGreen ? PhaseObservation::kGreen : PhaseObservation::kNotGreen;
}

/// Supervised target for one second: per phase, seconds until the observed
/// state flips, capped at the horizon, with a validity mask.
struct PhaseTargets {
  UnixSeconds timestamp = 0;
  std::array<int, ingest::kPhaseCount> remaining{};     // >= 1 where valid
  std::array<bool, ingest::kPhaseCount> valid{};
  std::array<double, ingest::kPhaseCount> normalized{}; // remaining / horizon
};

/// Per-phase observations on a gapless 1 s grid.
struct DayStates {
  UnixSeconds start = 0;
  std::vector<std::array<PhaseObservation, ingest::kPhaseCount>> states;
};

/// O(1)-per-second rolling recurrence, scanning the day once from the end:
/// remaining(t) = remaining(t+1) + 1 while no switch intervenes. An entry is
/// masked when the state itself is missing, when a missing second blocks
/// certifying the switch instant, or when no switch occurs within `horizon`.
std::vector<PhaseTargets> compute_targets(const DayStates& day, int horizon = kHorizonSeconds);

/// Fill `normalized` as remaining / horizon on valid entries.
void normalize_targets(std::vector<PhaseTargets>& targets, int horizon = kHorizonSeconds);

/// Fraction of (second, phase) entries that are masked.
double masked_fraction(const std::vector<PhaseTargets>& targets);

}  // namespace phasecast::label

#endif  // PHASECAST_LABEL_TARGETS_HPP_
