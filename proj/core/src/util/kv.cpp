#include "phasecast/util/kv.hpp"
#include <algorithm>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace phasecast {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KvFile KvFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw KvParseError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

KvFile KvFile::parse_text(const std::string& text, const std::string& origin) {
  KvFile kv;
  kv.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw KvParseError(origin + ":" + std::to_string(lineno) + ": expected `key = value`");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw KvParseError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    kv.index_.emplace(key, kv.entries_.size());
    kv.entries_.emplace_back(std::move(key), std::move(value));
  }
  return kv;
}

bool KvFile::has(const std::string& key) const { return index_.count(key) > 0; }

const std::string& KvFile::get(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) fail("missing key `" + key + "`");
  return entries_[it->second].second;
}

std::string KvFile::get_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

long KvFile::get_int(const std::string& key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') fail("key `" + key + "`: not an integer: " + v);
  return x;
}

long KvFile::get_int_or(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double KvFile::get_double(const std::string& key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') fail("key `" + key + "`: not a number: " + v);
  return x;
}

double KvFile::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

bool KvFile::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail("key `" + key + "`: not a boolean: " + v);
}

std::vector<std::string> KvFile::get_all(const std::string& key) const {
  std::vector<std::string> out;
  auto [lo, hi] = index_.equal_range(key);
  std::vector<std::size_t> order;
  for (auto it = lo; it != hi; ++it) order.push_back(it->second);
  std::sort(order.begin(), order.end());
  for (std::size_t i : order) out.push_back(entries_[i].second);
  return out;
}

std::vector<std::string> KvFile::keys_with_prefix(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (k.rfind(prefix, 0) == 0) {
      bool seen = false;
      for (const auto& s : out) {
        if (s == k) {
          seen = true;
          break;
        }
      }
      if (!seen) out.push_back(k);
    }
  }
  return out;
}

void KvFile::fail(const std::string& msg) const {
  throw KvParseError(origin_ + ": " + msg);
}

}  // namespace phasecast
