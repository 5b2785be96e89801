#include "phasecast/ingest/schema.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "phasecast/util/hash.hpp"

namespace phasecast::ingest {

namespace {
constexpr const char* kTimeOfDayName = "time_of_day";
}

int Variable::encoded_width() const {
  switch (kind) {
    case VariableKind::kNumeric:
      return 1;
    case VariableKind::kCategorical:
      return static_cast<int>(states.size()) - 1;
    case VariableKind::kCyclicTime:
      return 2;
  }
  return 0;
}

void SchemaManifest::finalize() {
  feature_count = 0;
  for (const auto& v : variables) feature_count += v.encoded_width();
}

std::uint64_t SchemaManifest::content_hash() const {
  // Canonical serialization of everything that affects encoding.
  std::ostringstream ss;
  ss << "v" << version << ";n" << feature_count << ";";
  for (const auto& v : variables) {
    ss << v.name << "|" << static_cast<int>(v.kind) << "|";
    if (v.kind == VariableKind::kNumeric) {
      ss.precision(17);
      ss << v.min << "," << v.max;
    } else {
      for (const auto& s : v.states) ss << s << ",";
    }
    ss << ";";
  }
  return fnv1a64(ss.str());
}

void SchemaManifest::save(const std::string& path) const {
  nlohmann::ordered_json j;
  j["version"] = version;
  j["feature_count"] = feature_count;
  j["content_hash"] = hash_hex(content_hash());
  auto& vars = j["variables"];
  vars = nlohmann::ordered_json::array();
  for (const auto& v : variables) {
    nlohmann::ordered_json var;
    var["name"] = v.name;
    switch (v.kind) {
      case VariableKind::kNumeric:
        var["kind"] = "numeric";
        var["min"] = v.min;
        var["max"] = v.max;
        break;
      case VariableKind::kCategorical:
        var["kind"] = "categorical";
        var["states"] = v.states;
        break;
      case VariableKind::kCyclicTime:
        var["kind"] = "cyclic-time";
        break;
    }
    vars.push_back(var);
  }
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write manifest: " + path);
  out << j.dump(2) << "\n";
}

SchemaManifest SchemaManifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open manifest: " + path);
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("bad manifest json: ") + e.what());
  }
  SchemaManifest m;
  m.version = j.at("version").get<int>();
  for (const auto& var : j.at("variables")) {
    Variable v;
    v.name = var.at("name").get<std::string>();
    const std::string kind = var.at("kind").get<std::string>();
    if (kind == "numeric") {
      v.kind = VariableKind::kNumeric;
      v.min = var.at("min").get<double>();
      v.max = var.at("max").get<double>();
    } else if (kind == "categorical") {
      v.kind = VariableKind::kCategorical;
      v.states = var.at("states").get<std::vector<std::string>>();
    } else if (kind == "cyclic-time") {
      v.kind = VariableKind::kCyclicTime;
    } else {
      throw SchemaError("unknown variable kind: " + kind);
    }
    m.variables.push_back(std::move(v));
  }
  m.finalize();
  if (m.feature_count != j.at("feature_count").get<int>()) {
    throw SchemaError("manifest feature_count does not match its variables");
  }
  const std::string recorded = j.at("content_hash").get<std::string>();
  if (recorded != hash_hex(m.content_hash())) {
    throw SchemaError("manifest content hash mismatch (file edited?)");
  }
  return m;
}

SchemaHints SchemaHints::parse(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("bad hints json: ") + e.what());
  }
  SchemaHints hints;
  for (const auto& rule : j.at("rules")) {
    Rule r;
    r.pattern = rule.at("pattern").get<std::string>();
    r.kind = rule.at("kind").get<std::string>();
    if (r.kind != "numeric" && r.kind != "categorical" && r.kind != "drop") {
      throw SchemaError("hint rule kind must be numeric|categorical|drop: " + r.kind);
    }
    if (rule.contains("states")) r.states = rule["states"].get<std::vector<std::string>>();
    hints.rules.push_back(std::move(r));
  }
  return hints;
}

SchemaHints SchemaHints::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open hints: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

namespace {

bool segments_match(const std::string& pattern, const std::string& key) {
  std::size_t pi = 0, ki = 0;
  while (pi < pattern.size() || ki < key.size()) {
    std::size_t pe = pattern.find('.', pi);
    std::size_t ke = key.find('.', ki);
    if (pe == std::string::npos) pe = pattern.size();
    if (ke == std::string::npos) ke = key.size();
    if (pi >= pattern.size() || ki >= key.size()) return false;
    const std::string pseg = pattern.substr(pi, pe - pi);
    const std::string kseg = key.substr(ki, ke - ki);
    if (pseg != "*" && pseg != kseg) return false;
    pi = pe + 1;
    ki = ke + 1;
    if (pi > pattern.size() && ki > key.size()) return true;
    if ((pi > pattern.size()) != (ki > key.size())) return false;
  }
  return true;
}

}  // namespace

const SchemaHints::Rule* SchemaHints::match(const std::string& key) const {
  for (const auto& r : rules) {
    if (segments_match(r.pattern, key)) return &r;
  }
  return nullptr;
}

SchemaBuilder::SchemaBuilder(SchemaHints hints) : hints_(std::move(hints)) {}

void SchemaBuilder::observe(const FlatRow& row) {
  for (const auto& [key, value] : row.values) {
    const SchemaHints::Rule* rule = hints_.match(key);
    if (!rule || rule->kind == "drop") continue;

    auto it = key_index_.find(key);
    Seen* seen;
    if (it == key_index_.end()) {
      key_index_.emplace(key, seen_.size());
      seen_.push_back(Seen{key, rule, 0.0, 0.0, false, {}});
      seen = &seen_.back();
    } else {
      seen = &seen_[it->second];
    }

    if (value.missing()) continue;
    if (rule->kind == "numeric") {
      if (!value.number) continue;  // label where a number was declared: skip
      if (!seen->any_numeric) {
        seen->min = seen->max = *value.number;
        seen->any_numeric = true;
      } else {
        seen->min = std::min(seen->min, *value.number);
        seen->max = std::max(seen->max, *value.number);
      }
    } else {  // categorical: numbers are treated as labels of their text form
      std::string label = leaf_label(value);
      if (std::find(seen->states.begin(), seen->states.end(), label) == seen->states.end()) {
        seen->states.push_back(label);
      }
    }
  }
}

SchemaManifest SchemaBuilder::finalize() const {
  SchemaManifest m;
  for (const auto& s : seen_) {
    Variable v;
    v.name = s.name;
    if (s.rule->kind == "numeric") {
      v.kind = VariableKind::kNumeric;
      if (!s.any_numeric || s.min == s.max) {
        throw DegenerateVariableError("variable " + s.name +
                                      " is constant over the sample days; drop it or widen the "
                                      "sample");
      }
      v.min = s.min;
      v.max = s.max;
    } else {
      v.kind = VariableKind::kCategorical;
      // Declared state order wins; observed-only states are appended so the
      // reference (all-zeros) state is the last declared/observed one.
      v.states = s.rule->states;
      for (const auto& st : s.states) {
        if (std::find(v.states.begin(), v.states.end(), st) == v.states.end()) {
          v.states.push_back(st);
        }
      }
      if (v.states.size() < 1) {
        throw DegenerateVariableError("categorical variable " + s.name + " has no states");
      }
    }
    m.variables.push_back(std::move(v));
  }
  // Time of day is derived from the timestamp and always present, encoded as
  // a point on the daily circle.
  Variable tod;
  tod.name = kTimeOfDayName;
  tod.kind = VariableKind::kCyclicTime;
  m.variables.push_back(tod);
  m.finalize();
  return m;
}

SchemaManifest build_schema(const std::vector<std::vector<FlatRow>>& sample_days,
                            const SchemaHints& hints) {
  if (sample_days.empty()) throw SchemaError("need at least one sample day");
  SchemaBuilder builder(hints);
  for (const auto& day : sample_days) {
    for (const auto& row : day) builder.observe(row);
  }
  return builder.finalize();
}

}  // namespace phasecast::ingest
