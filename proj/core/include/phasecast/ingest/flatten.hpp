#ifndef PHASECAST_INGEST_FLATTEN_HPP_
#define PHASECAST_INGEST_FLATTEN_HPP_

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "phasecast/util/time.hpp"

namespace phasecast::ingest {

struct MalformedRecordError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingTimestampError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A leaf value: numeric, categorical label, or absent.
struct LeafValue {
  std::optional<double> number;
  std::optional<std::string> label;

  bool missing() const { return !number && !label; }
  static LeafValue make_number(double v) { return {v, std::nullopt}; }
  static LeafValue make_label(std::string s) { return {std::nullopt, std::move(s)}; }
  static LeafValue make_missing() { return {}; }
};

/// One record flattened to dot-joined leaf paths, insertion-ordered.
struct FlatRow {
  UnixSeconds timestamp = 0;
  std::vector<std::pair<std::string, LeafValue>> values;

  const LeafValue* find(const std::string& key) const;
};

/// Parse one JSON text record and flatten the tree. Booleans become 0/1,
/// nulls become missing. Throws MalformedRecordError / MissingTimestampError.
FlatRow flatten_record(const std::string& json_text);

/// Categorical label of a leaf: strings pass through, integral numbers print
/// without a decimal point ("0", "1"), other numbers as %g.
std::string leaf_label(const LeafValue& value);

}  // namespace phasecast::ingest

#endif  // PHASECAST_INGEST_FLATTEN_HPP_
