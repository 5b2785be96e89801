#ifndef PHASECAST_SEQ_SEQUENCER_HPP_
#define PHASECAST_SEQ_SEQUENCER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "phasecast/ingest/day_container.hpp"

namespace phasecast::seq {

struct WidthMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr int kWindowSeconds = 120;
constexpr int kDefaultBatchSize = 1000;

/// (day, prediction second) pair; the window covers rows [t - window + 1, t].
struct SampleRef {
  std::uint32_t day = 0;
  std::uint32_t t = 0;
};

/// Sliding-window view over prepared day containers. Samples are never
/// materialized up front; windows are sliced out of the day matrices on
/// demand, so memory stays bounded by the batch size.
class SequenceDataset {
 public:
  SequenceDataset(std::vector<const ingest::DayContainer*> days, int window = kWindowSeconds);

  const std::vector<SampleRef>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  int window() const { return window_; }
  int feature_width() const { return feature_width_; }
  std::uint64_t manifest_hash() const { return manifest_hash_; }

  /// Window rows oldest-first into `dst` (window x feature_width, row-major
  /// doubles). Missing seconds pass through as -1 rows.
  void fill_window(const SampleRef& s, double* dst) const;

  /// Same, in the on-disk float32 representation (straight row copies).
  void fill_window_f32(const SampleRef& s, float* dst) const;

  /// Normalized targets and masks of the prediction second.
  void fill_targets(const SampleRef& s, double* targets, double* masks) const;

  int true_seconds(const SampleRef& s, int phase_idx) const;

  /// Persist the sample index so epochs are reproducible across restarts.
  void save_index(const std::string& path, const std::vector<std::string>& day_names) const;

 private:
  std::vector<const ingest::DayContainer*> days_;
  std::vector<SampleRef> samples_;
  int window_;
  int feature_width_ = 0;
  std::uint64_t manifest_hash_ = 0;
};

/// One training batch, materialized contiguously.
struct SequenceBatch {
  int count = 0;
  int window = 0;
  int feature_width = 0;
  std::vector<float> windows;   // count x window x feature_width
  std::vector<double> targets;  // count x 6
  std::vector<double> masks;    // count x 6
  std::vector<SampleRef> refs;
};

/// Seeded epoch permutation streamed in batches. Every sample appears
/// exactly once per epoch; (seed, epoch) fully determine the order.
class BatchStream {
 public:
  BatchStream(const SequenceDataset& dataset, std::size_t batch_size, std::uint64_t seed,
              std::uint64_t epoch, bool shuffle = true);

  /// Fills `out`; returns false when the epoch is exhausted.
  bool next(SequenceBatch& out);

  std::size_t batches_total() const;

 private:
  const SequenceDataset& dataset_;
  std::size_t batch_size_;
  std::vector<std::uint32_t> order_;
  std::size_t pos_ = 0;
};

}  // namespace phasecast::seq

#endif  // PHASECAST_SEQ_SEQUENCER_HPP_
