#ifndef PHASECAST_UTIL_RNG_HPP_
#define PHASECAST_UTIL_RNG_HPP_

#include <cstdint>
#include <vector>

namespace phasecast {

/// Self-contained xoshiro256++ generator. The standard library engines are
/// deterministic but the distributions are not pinned across implementations,
/// so every stochastic draw in the project goes through this class.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform in [0, 1), 53-bit resolution.
  double next_double();

  /// Unbiased uniform integer in [0, bound). bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound);

  bool bernoulli(double p);

  /// Knuth product method; intended for small means (lane arrivals).
  int poisson(double mean);

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);

  /// Derive an independent stream for a named purpose so that adding draws
  /// to one consumer never perturbs another.
  Rng fork(std::uint64_t stream_id) const;

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_[4];
};

}  // namespace phasecast

#endif  // PHASECAST_UTIL_RNG_HPP_
