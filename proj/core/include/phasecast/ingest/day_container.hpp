#ifndef PHASECAST_INGEST_DAY_CONTAINER_HPP_
#define PHASECAST_INGEST_DAY_CONTAINER_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "phasecast/util/time.hpp"

namespace phasecast::ingest {

struct ContainerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr int kPhaseCount = 6;
constexpr int kTargetColumns = 2 * kPhaseCount;  // 6 normalized targets + 6 masks

/// One prepared day: encoded features plus the 6 target columns and 6 mask
/// columns appended, stored as little-endian float32, row per second.
///
///   columns [0, feature_width)                      features
///   columns [feature_width, feature_width + 6)      normalized targets
///   columns [feature_width + 6, feature_width + 12) masks (1 valid, 0 missing)
class DayContainer {
 public:
  DayContainer() = default;
  DayContainer(int feature_width, std::int64_t start_timestamp, std::uint64_t manifest_hash);

  void append_row(const float* features, const float* targets, const float* masks);

  int feature_width() const { return feature_width_; }
  int total_width() const { return feature_width_ + kTargetColumns; }
  std::int64_t start_timestamp() const { return start_timestamp_; }
  std::uint64_t manifest_hash() const { return manifest_hash_; }
  std::size_t rows() const { return rows_; }

  const float* row(std::size_t r) const { return data_.data() + r * total_width(); }
  const float* features(std::size_t r) const { return row(r); }
  const float* targets(std::size_t r) const { return row(r) + feature_width_; }
  const float* masks(std::size_t r) const { return row(r) + feature_width_ + kPhaseCount; }

  /// True remaining seconds for (row, phase index); -1 when masked.
  int true_seconds(std::size_t r, int phase_idx) const;

  void save(const std::string& path) const;
  static DayContainer load(const std::string& path);

 private:
  int feature_width_ = 0;
  std::int64_t start_timestamp_ = 0;
  std::uint64_t manifest_hash_ = 0;
  std::size_t rows_ = 0;
  std::vector<float> data_;
};

}  // namespace phasecast::ingest

#endif  // PHASECAST_INGEST_DAY_CONTAINER_HPP_
