#ifndef PHASECAST_INGEST_SCHEMA_HPP_
#define PHASECAST_INGEST_SCHEMA_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phasecast/ingest/flatten.hpp"

namespace phasecast::ingest {

struct DegenerateVariableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class VariableKind { kNumeric, kCategorical, kCyclicTime };

struct Variable {
  std::string name;
  VariableKind kind = VariableKind::kNumeric;
  double min = 0.0;                 // numeric only
  double max = 0.0;
  std::vector<std::string> states;  // categorical only; last one is the
                                    // reference state encoded as all zeros

  int encoded_width() const;
};

/// Ordered feature dictionary. Frozen once built: training, validation, test
/// and field data must all encode against the same manifest (hash-checked).
struct SchemaManifest {
  int version = 1;
  std::vector<Variable> variables;
  int feature_count = 0;

  std::uint64_t content_hash() const;
  void save(const std::string& path) const;
  static SchemaManifest load(const std::string& path);

  /// Recompute feature_count from the variables.
  void finalize();
};

/// Variable-kind declarations. Each rule has a dot-path pattern where `*`
/// matches one segment; the first matching rule decides the kind. Keys with
/// no matching rule are dropped from the manifest.
struct SchemaHints {
  struct Rule {
    std::string pattern;
    std::string kind;  // numeric | categorical | drop
    std::vector<std::string> states;  // optional pre-declared state order
  };
  std::vector<Rule> rules;

  static SchemaHints load(const std::string& path);
  static SchemaHints parse(const std::string& json_text);
  const Rule* match(const std::string& key) const;
};

/// Incremental manifest construction over sample days.
class SchemaBuilder {
 public:
  explicit SchemaBuilder(SchemaHints hints);

  void observe(const FlatRow& row);

  /// Throws DegenerateVariableError when a numeric variable never varied.
  SchemaManifest finalize() const;

 private:
  struct Seen {
    std::string name;
    const SchemaHints::Rule* rule;
    double min = 0.0;
    double max = 0.0;
    bool any_numeric = false;
    std::vector<std::string> states;  // observed order
  };
  SchemaHints hints_;
  std::vector<Seen> seen_;                       // first-observed order
  std::map<std::string, std::size_t> key_index_; // key -> index into seen_
};

/// Convenience wrapper over SchemaBuilder for in-memory sample days.
SchemaManifest build_schema(const std::vector<std::vector<FlatRow>>& sample_days,
                            const SchemaHints& hints);

}  // namespace phasecast::ingest

#endif  // PHASECAST_INGEST_SCHEMA_HPP_
