#include "phasecast/sim/simulator.hpp"

#include "phasecast/sim/controller.hpp"
#include "phasecast/sim/traffic.hpp"

namespace phasecast::sim {

void simulate_day(const IntersectionConfig& config, UnixSeconds date, std::uint64_t seed,
                  const RecordSink& sink) {
  Rng day_rng(seed ^ static_cast<std::uint64_t>(date));
  Rng ped_rng = day_rng.fork(1);
  Rng traffic_rng = day_rng.fork(2);

  const UnixSeconds start = date + config.span_start;
  const UnixSeconds end = date + config.span_end;

  RingBarrierController controller(config, start);
  TrafficModel traffic(config);
  std::set<PhaseId> prev_actuations;

  for (UnixSeconds now = start; now < end; ++now) {
    const int tod = time_of_day(now);

    RingBarrierController::Inputs inputs;
    inputs.actuations = prev_actuations;
    for (const auto& [veh, profile] : config.ped_call_rates) {
      if (ped_rng.poisson(profile.at(tod)) > 0) inputs.ped_call_events.insert(veh);
    }

    PerSecondRecord record = controller.tick(now, inputs);

    std::set<PhaseId> green;
    for (const auto& [id, snap] : record.phases) {
      if (snap.state == SignalState::kGreen) green.insert(id);
    }
    record.detectors = traffic.step(tod, green, traffic_rng);
    prev_actuations = traffic.actuated_phases(record.detectors);

    sink(record);
  }
}

std::vector<PerSecondRecord> simulate_day(const IntersectionConfig& config, UnixSeconds date,
                                          std::uint64_t seed) {
  std::vector<PerSecondRecord> out;
  out.reserve(static_cast<std::size_t>(config.span_end - config.span_start));
  simulate_day(config, date, seed, [&](const PerSecondRecord& r) { out.push_back(r); });
  return out;
}

FeedCorruptor::FeedCorruptor(double dropout_prob, double duplicate_prob, std::uint64_t seed)
    : dropout_prob_(dropout_prob), duplicate_prob_(duplicate_prob), rng_(seed) {}

int FeedCorruptor::copies_for_next() {
  if (rng_.bernoulli(dropout_prob_)) return 0;
  return rng_.bernoulli(duplicate_prob_) ? 2 : 1;
}

std::vector<PerSecondRecord> corrupt_feed(const std::vector<PerSecondRecord>& records,
                                          double dropout_prob, double duplicate_prob,
                                          std::uint64_t seed) {
  FeedCorruptor corruptor(dropout_prob, duplicate_prob, seed);
  std::vector<PerSecondRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    int copies = corruptor.copies_for_next();
    for (int i = 0; i < copies; ++i) out.push_back(r);
  }
  return out;
}

}  // namespace phasecast::sim
