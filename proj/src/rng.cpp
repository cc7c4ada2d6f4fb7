#include "sklab/rng.hpp"

namespace sklab {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t CounterRng::mix(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix(mix(seed) ^ (stream * 0xda942042e4dd58b5ULL))) {}

std::uint64_t CounterRng::next_u64() {
  ++ctr_;
  return mix(key_ + ctr_ * kGolden);
}

double CounterRng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

std::uint64_t CounterRng::next_below(std::uint64_t n) {
  // Rejection zone keeps the distribution exactly uniform.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  for (;;) {
    const std::uint64_t u = next_u64();
    if (u < limit) return u % n;
  }
}

void CounterRng::shuffle(std::vector<int>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

std::uint64_t CounterRng::derive_stream(std::uint64_t a, std::uint64_t b,
                                        std::uint64_t c, std::uint64_t d) {
  std::uint64_t h = mix(a);
  h = mix(h ^ b);
  h = mix(h ^ c);
  h = mix(h ^ d);
  return h;
}

}  // namespace sklab
