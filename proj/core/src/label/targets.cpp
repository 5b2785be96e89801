#include "phasecast/label/targets.hpp"

namespace phasecast::label {

std::vector<PhaseTargets> compute_targets(const DayStates& day, int horizon) {
  const std::size_t n = day.states.size();
  std::vector<PhaseTargets> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].timestamp = day.start + static_cast<UnixSeconds>(i);
    out[i].remaining.fill(-1);
    out[i].valid.fill(false);
    out[i].normalized.fill(0.0);
  }
  if (n == 0) return out;

  for (int p = 0; p < ingest::kPhaseCount; ++p) {
    // Last second has no future: always masked.
    for (std::size_t i = n - 1; i-- > 0;) {
      const PhaseObservation here = day.states[i][static_cast<std::size_t>(p)];
      if (here == PhaseObservation::kMissing) continue;
      const PhaseObservation next = day.states[i + 1][static_cast<std::size_t>(p)];
      if (next == PhaseObservation::kMissing) continue;  // switch instant uncertifiable
      if (next != here) {
        out[i].remaining[static_cast<std::size_t>(p)] = 1;
        out[i].valid[static_cast<std::size_t>(p)] = true;
      } else if (out[i + 1].valid[static_cast<std::size_t>(p)]) {
        const int r = out[i + 1].remaining[static_cast<std::size_t>(p)] + 1;
        if (r <= horizon) {
          out[i].remaining[static_cast<std::size_t>(p)] = r;
          out[i].valid[static_cast<std::size_t>(p)] = true;
        }
      }
    }
  }
  normalize_targets(out, horizon);
  return out;
}

void normalize_targets(std::vector<PhaseTargets>& targets, int horizon) {
  for (auto& t : targets) {
    for (int p = 0; p < ingest::kPhaseCount; ++p) {
      t.normalized[static_cast<std::size_t>(p)] =
          t.valid[static_cast<std::size_t>(p)]
              ? static_cast<double>(t.remaining[static_cast<std::size_t>(p)]) / horizon
              : 0.0;
    }
  }
}

double masked_fraction(const std::vector<PhaseTargets>& targets) {
  if (targets.empty()) return 0.0;
  long long masked = 0;
  for (const auto& t : targets) {
    for (bool v : t.valid) {
      if (!v) ++masked;
    }
  }
  return static_cast<double>(masked) /
         (static_cast<double>(targets.size()) * ingest::kPhaseCount);
}

}  // namespace phasecast::label
