#ifndef PHASECAST_UTIL_KV_HPP_
#define PHASECAST_UTIL_KV_HPP_

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace phasecast {

struct KvParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` configuration file. `#` starts a comment, blank lines
/// are ignored, keys may repeat (e.g. one line per overlap pair).
class KvFile {
 public:
  static KvFile parse_file(const std::string& path);
  static KvFile parse_text(const std::string& text, const std::string& origin = "<memory>");

  bool has(const std::string& key) const;

  /// Single-valued accessors; throw KvParseError when absent or malformed.
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  long get_int(const std::string& key) const;
  long get_int_or(const std::string& key, long fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key) const;

  /// All values recorded for a (possibly repeated) key, in file order.
  std::vector<std::string> get_all(const std::string& key) const;

  /// Keys beginning with `prefix`, deduplicated, in first-appearance order.
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::multimap<std::string, std::size_t> index_;
  std::string origin_;

  [[noreturn]] void fail(const std::string& msg) const;
};

}  // namespace phasecast

#endif  // PHASECAST_UTIL_KV_HPP_
