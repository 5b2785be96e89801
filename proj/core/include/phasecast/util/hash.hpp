#ifndef PHASECAST_UTIL_HASH_HPP_
#define PHASECAST_UTIL_HASH_HPP_

#include <cstdint>
#include <string>
#include <string_view>

namespace phasecast {

// FNV-1a, 64 bit. Used for content hashes that must be stable across runs,
// builds, and platforms (std::hash guarantees none of that).
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace phasecast

#endif  // PHASECAST_UTIL_HASH_HPP_
