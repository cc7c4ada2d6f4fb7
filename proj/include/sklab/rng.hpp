// Counter-based deterministic RNG. Streams are derived from (seed, stream)
// and every output depends only on the counter value, so results do not
// depend on call interleaving across cells or samples.
#pragma once

#include <cstdint>
#include <vector>

namespace sklab {

// Frozen algorithm identifier, recorded in experiment metadata. Bump only
// with a new id; outputs under a given id must never change.
inline constexpr const char* kRngAlgorithmId = "skrng-splitmix64-v1";

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  // Uniform in [0,1), 53-bit resolution.
  double next_double();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [0, n), n >= 1, rejection-sampled (no modulo bias).
  std::uint64_t next_below(std::uint64_t n);
  // In-place Fisher-Yates shuffle with this generator (stable across
  // platforms, unlike std::shuffle).
  void shuffle(std::vector<int>& v);

  // Stable 64-bit mix used for stream derivation (splitmix64 finalizer).
  static std::uint64_t mix(std::uint64_t z);
  // Key derivation helper: fold a sequence of indices into a stream id.
  static std::uint64_t derive_stream(std::uint64_t a, std::uint64_t b = 0,
                                     std::uint64_t c = 0, std::uint64_t d = 0);

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace sklab
