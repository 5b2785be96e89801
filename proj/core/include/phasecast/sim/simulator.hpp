#ifndef PHASECAST_SIM_SIMULATOR_HPP_
#define PHASECAST_SIM_SIMULATOR_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "phasecast/sim/config.hpp"
#include "phasecast/sim/record.hpp"
#include "phasecast/util/rng.hpp"

namespace phasecast::sim {

using RecordSink = std::function<void(const PerSecondRecord&)>;

/// One record per second of the operating span on `date` (midnight Unix s).
/// Identical (config, date, seed) produce bit-identical streams.
void simulate_day(const IntersectionConfig& config, UnixSeconds date, std::uint64_t seed,
                  const RecordSink& sink);

/// Convenience wrapper materializing the whole day; prefer the sink form for
/// full-length days.
std::vector<PerSecondRecord> simulate_day(const IntersectionConfig& config, UnixSeconds date,
                                          std::uint64_t seed);

/// Streaming corruption decision: how many copies of the next record to emit
/// (0 = dropped, 2 = duplicated). Timestamp order is preserved because
/// duplicates are adjacent.
class FeedCorruptor {
 public:
  FeedCorruptor(double dropout_prob, double duplicate_prob, std::uint64_t seed);
  int copies_for_next();

 private:
  double dropout_prob_;
  double duplicate_prob_;
  Rng rng_;
};

std::vector<PerSecondRecord> corrupt_feed(const std::vector<PerSecondRecord>& records,
                                          double dropout_prob, double duplicate_prob,
                                          std::uint64_t seed);

}  // namespace phasecast::sim

#endif  // PHASECAST_SIM_SIMULATOR_HPP_
