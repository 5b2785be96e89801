#include "phasecast/seq/sequencer.hpp"
#include <cmath>

#include <cstring>
#include <fstream>

#include "phasecast/util/rng.hpp"

namespace phasecast::seq {

SequenceDataset::SequenceDataset(std::vector<const ingest::DayContainer*> days, int window)
    : days_(std::move(days)), window_(window) {
  if (days_.empty()) throw WidthMismatchError("dataset needs at least one day");
  feature_width_ = days_.front()->feature_width();
  manifest_hash_ = days_.front()->manifest_hash();
  for (const auto* day : days_) {
    if (day->feature_width() != feature_width_) {
      throw WidthMismatchError("day containers disagree on feature width");
    }
    if (day->manifest_hash() != manifest_hash_) {
      throw WidthMismatchError("day containers were encoded against different manifests");
    }
  }
  // One candidate per second with a full window behind it; windows never
  // span day files. Seconds whose six targets are all masked are skipped.
  for (std::uint32_t d = 0; d < days_.size(); ++d) {
    const auto& day = *days_[d];
    if (day.rows() < static_cast<std::size_t>(window_)) continue;
    for (std::size_t t = static_cast<std::size_t>(window_) - 1; t < day.rows(); ++t) {
      const float* masks = day.masks(t);
      bool any_valid = false;
      for (int p = 0; p < ingest::kPhaseCount; ++p) {
        if (masks[p] != 0.0f) any_valid = true;
      }
      if (any_valid) samples_.push_back({d, static_cast<std::uint32_t>(t)});
    }
  }
}

void SequenceDataset::fill_window(const SampleRef& s, double* dst) const {
  const auto& day = *days_[s.day];
  const std::size_t first = s.t - static_cast<std::size_t>(window_) + 1;
  for (int r = 0; r < window_; ++r) {
    const float* src = day.features(first + static_cast<std::size_t>(r));
    double* out = dst + static_cast<std::size_t>(r) * feature_width_;
    for (int c = 0; c < feature_width_; ++c) out[c] = static_cast<double>(src[c]);
  }
}

void SequenceDataset::fill_window_f32(const SampleRef& s, float* dst) const {
  const auto& day = *days_[s.day];
  const std::size_t first = s.t - static_cast<std::size_t>(window_) + 1;
  for (int r = 0; r < window_; ++r) {
    std::memcpy(dst + static_cast<std::size_t>(r) * feature_width_,
                day.features(first + static_cast<std::size_t>(r)),
                static_cast<std::size_t>(feature_width_) * sizeof(float));
  }
}

void SequenceDataset::fill_targets(const SampleRef& s, double* targets, double* masks) const {
  const auto& day = *days_[s.day];
  const float* t = day.targets(s.t);
  const float* m = day.masks(s.t);
  for (int p = 0; p < ingest::kPhaseCount; ++p) {
    masks[p] = static_cast<double>(m[p]);
    // Targets are stored as k/200 float32; reconstruct the exact rational in
    // double so losses see the value the labeler computed.
    targets[p] = m[p] != 0.0f
                     ? std::lround(static_cast<double>(t[p]) * 200.0) / 200.0
                     : 0.0;
  }
}

int SequenceDataset::true_seconds(const SampleRef& s, int phase_idx) const {
  return days_[s.day]->true_seconds(s.t, phase_idx);
}

void SequenceDataset::save_index(const std::string& path,
                                 const std::vector<std::string>& day_names) const {
  std::ofstream out(path);
  if (!out) throw WidthMismatchError("cannot write sample index: " + path);
  out << "# day\tsecond_row\n";
  for (const auto& s : samples_) {
    out << (s.day < day_names.size() ? day_names[s.day] : std::to_string(s.day)) << "\t" << s.t
        << "\n";
  }
}

BatchStream::BatchStream(const SequenceDataset& dataset, std::size_t batch_size,
                         std::uint64_t seed, std::uint64_t epoch, bool shuffle)
    : dataset_(dataset), batch_size_(batch_size) {
  order_.resize(dataset.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<std::uint32_t>(i);
  if (shuffle) {
    Rng rng((seed * 0x9e3779b97f4a7c15ULL) ^ (epoch + 1));
    rng.shuffle(order_);
  }
}

std::size_t BatchStream::batches_total() const {
  return (order_.size() + batch_size_ - 1) / batch_size_;
}

bool BatchStream::next(SequenceBatch& out) {
  if (pos_ >= order_.size()) return false;
  const std::size_t count = std::min(batch_size_, order_.size() - pos_);
  const int window = dataset_.window();
  const int width = dataset_.feature_width();
  out.count = static_cast<int>(count);
  out.window = window;
  out.feature_width = width;
  const std::size_t window_elems = static_cast<std::size_t>(window) * width;
  out.windows.resize(count * window_elems);
  out.targets.resize(count * ingest::kPhaseCount);
  out.masks.resize(count * ingest::kPhaseCount);
  out.refs.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const SampleRef& ref = dataset_.samples()[order_[pos_ + k]];
    out.refs[k] = ref;
    dataset_.fill_window_f32(ref, out.windows.data() + k * window_elems);
    dataset_.fill_targets(ref, out.targets.data() + k * ingest::kPhaseCount,
                          out.masks.data() + k * ingest::kPhaseCount);
  }
  pos_ += count;
  return true;
}

}  // namespace phasecast::seq
