#include "phasecast/ingest/flatten.hpp"
#include <cstdio>

#include <json.hpp>

namespace phasecast::ingest {

const LeafValue* FlatRow::find(const std::string& key) const {
  for (const auto& [k, v] : values) {
    if (k == key) return &v;
  }
  return nullptr;
}

namespace {

void flatten_into(const nlohmann::ordered_json& node, const std::string& path, FlatRow& row) {
  if (node.is_object()) {
    for (const auto& [key, child] : node.items()) {
      flatten_into(child, path.empty() ? key : path + "." + key, row);
    }
    return;
  }
  if (node.is_array()) {
    int i = 0;
    for (const auto& child : node) {
      flatten_into(child, path + "." + std::to_string(i++), row);
    }
    return;
  }
  LeafValue leaf;
  if (node.is_number()) {
    leaf = LeafValue::make_number(node.get<double>());
  } else if (node.is_boolean()) {
    leaf = LeafValue::make_number(node.get<bool>() ? 1.0 : 0.0);
  } else if (node.is_string()) {
    leaf = LeafValue::make_label(node.get<std::string>());
  } else {
    leaf = LeafValue::make_missing();  // null
  }
  row.values.emplace_back(path, std::move(leaf));
}

}  // namespace

std::string leaf_label(const LeafValue& value) {
  if (value.label) return *value.label;
  if (!value.number) return "";
  const double v = *value.number;
  char buf[32];
  if (v == static_cast<long long>(v)) {
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
  } else {
    std::snprintf(buf, sizeof(buf), "%g", v);
  }
  return buf;
}

FlatRow flatten_record(const std::string& json_text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedRecordError(std::string("unparseable record: ") + e.what());
  }
  if (!j.is_object()) throw MalformedRecordError("record is not an object");
  if (!j.contains("timestamp") || !j["timestamp"].is_number()) {
    throw MissingTimestampError("record has no numeric timestamp");
  }

  FlatRow row;
  row.timestamp = j["timestamp"].get<UnixSeconds>();
  for (const auto& [key, child] : j.items()) {
    if (key == "timestamp") continue;
    flatten_into(child, key, row);
  }
  return row;
}

}  // namespace phasecast::ingest
