#include "phasecast/ingest/encode.hpp"

#include <algorithm>
#include <cmath>

namespace phasecast::ingest {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

Encoder::Encoder(const SchemaManifest& manifest, WarnFn warn)
    : manifest_(manifest), warn_(std::move(warn)) {
  int offset = 0;
  for (std::size_t i = 0; i < manifest_.variables.size(); ++i) {
    const Variable& v = manifest_.variables[i];
    if (v.kind == VariableKind::kCyclicTime) {
      time_of_day_offset_ = offset;
    } else {
      slots_[v.name] = Slot{i, offset};
    }
    offset += v.encoded_width();
  }
}

FeatureVector Encoder::all_missing(UnixSeconds timestamp) const {
  FeatureVector fv;
  fv.timestamp = timestamp;
  fv.fully_missing = true;
  fv.features.assign(static_cast<std::size_t>(manifest_.feature_count), kMissingValue);
  return fv;
}

FeatureVector Encoder::encode(const FlatRow& row) const {
  // Start fully missing: manifest variables absent from the row stay -1.
  FeatureVector fv = all_missing(row.timestamp);
  fv.fully_missing = false;

  for (const auto& [key, value] : row.values) {
    auto it = slots_.find(key);
    if (it == slots_.end()) continue;  // not in the manifest: dropped
    const Variable& v = manifest_.variables[it->second.variable];
    float* out = fv.features.data() + it->second.offset;

    if (value.missing()) continue;  // stays -1 in each of its columns

    if (v.kind == VariableKind::kNumeric) {
      if (!value.number) continue;
      double x = (*value.number - v.min) / (v.max - v.min);
      x = std::clamp(x, 0.0, 1.0);  // field values may exceed training bounds
      out[0] = static_cast<float>(x);
    } else if (v.kind == VariableKind::kCategorical) {
      const std::string label = leaf_label(value);
      auto pos = std::find(v.states.begin(), v.states.end(), label);
      const int n = static_cast<int>(v.states.size());
      for (int c = 0; c + 1 < n; ++c) out[c] = 0.0f;
      if (pos == v.states.end()) {
        // Unknown category at inference: encoded as the reference state.
        if (warn_) warn_("unknown category `" + label + "` for " + v.name);
      } else {
        const int idx = static_cast<int>(pos - v.states.begin());
        if (idx + 1 < n) out[idx] = 1.0f;  // last state is the all-zeros reference
      }
    }
  }

  if (time_of_day_offset_ >= 0) {
    const double tod = static_cast<double>(time_of_day(row.timestamp));
    const double angle = kTwoPi * tod / kSecondsPerDay;
    // sin/cos land in [-1,1]; rescaled to [0,1] so the missing sentinel
    // stays unambiguous.
    fv.features[static_cast<std::size_t>(time_of_day_offset_)] =
        static_cast<float>((std::sin(angle) + 1.0) / 2.0);
    fv.features[static_cast<std::size_t>(time_of_day_offset_) + 1] =
        static_cast<float>((std::cos(angle) + 1.0) / 2.0);
  }
  return fv;
}

std::vector<FeatureVector> reindex_day(const std::vector<FlatRow>& rows, UnixSeconds span_start,
                                       UnixSeconds span_end, const Encoder& encoder) {
  if (span_end < span_start) throw EmptySpanError("span end before start");
  std::vector<const FlatRow*> sorted;
  sorted.reserve(rows.size());
  for (const auto& r : rows) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const FlatRow* a, const FlatRow* b) { return a->timestamp < b->timestamp; });

  const std::size_t n = static_cast<std::size_t>(span_end - span_start + 1);
  std::vector<FeatureVector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(encoder.all_missing(span_start + static_cast<UnixSeconds>(i)));
  }
  for (const FlatRow* r : sorted) {
    if (r->timestamp < span_start || r->timestamp > span_end) continue;
    auto& slot = out[static_cast<std::size_t>(r->timestamp - span_start)];
    if (!slot.fully_missing) continue;  // duplicate timestamp: first one wins
    slot = encoder.encode(*r);
  }
  return out;
}

}  // namespace phasecast::ingest
