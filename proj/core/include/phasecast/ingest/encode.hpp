#ifndef PHASECAST_INGEST_ENCODE_HPP_
#define PHASECAST_INGEST_ENCODE_HPP_

#include <functional>
#include <map>
#include <vector>

#include "phasecast/ingest/flatten.hpp"
#include "phasecast/ingest/schema.hpp"

namespace phasecast::ingest {

/// The missing sentinel: every feature element is either in [0,1] or exactly
/// this value.
constexpr float kMissingValue = -1.0f;

struct FeatureVector {
  UnixSeconds timestamp = 0;
  std::vector<float> features;  // width == manifest.feature_count
  bool fully_missing = false;
};

/// Stateless row encoder with a prebuilt key index. Encoding is a pure
/// function of (row, manifest).
class Encoder {
 public:
  using WarnFn = std::function<void(const std::string&)>;

  explicit Encoder(const SchemaManifest& manifest, WarnFn warn = nullptr);

  FeatureVector encode(const FlatRow& row) const;

  /// A row of width feature_count entirely set to the missing sentinel.
  FeatureVector all_missing(UnixSeconds timestamp) const;

  int width() const { return manifest_.feature_count; }
  const SchemaManifest& manifest() const { return manifest_; }

 private:
  struct Slot {
    std::size_t variable;  // index into manifest.variables
    int offset;            // first encoded column of the variable
  };
  SchemaManifest manifest_;
  std::map<std::string, Slot> slots_;
  int time_of_day_offset_ = -1;
  WarnFn warn_;
};

struct EmptySpanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Re-index rows onto a gapless 1 s grid over [span_start, span_end]
/// (inclusive ends). Absent seconds become all-missing vectors; duplicate
/// timestamps keep the first occurrence. Rows are sorted by timestamp first.
std::vector<FeatureVector> reindex_day(const std::vector<FlatRow>& rows, UnixSeconds span_start,
                                       UnixSeconds span_end, const Encoder& encoder);

}  // namespace phasecast::ingest

#endif  // PHASECAST_INGEST_ENCODE_HPP_
