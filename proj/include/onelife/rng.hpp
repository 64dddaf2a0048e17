#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace onelife {

// splitmix64 step; used for seeding and for stateless keyed draws.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
  return splitmix64(x);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// xoshiro256** with splitmix64 seeding. Fully specified, so streams are
// identical across platforms and standard-library versions; never use
// std::uniform_int_distribution here (its output is not pinned by the
// standard).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) w = splitmix64(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Unbiased draw in [0, n) via rejection; n must be positive.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // [0, 1) with 53 random bits.
  double real01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return real01() < p; }

  // Substreams are derived from the construction seed, not the current
  // state, so the draw order in one stream never perturbs another.
  Rng substream(std::string_view tag) const { return Rng(mix64(seed_, fnv1a64(tag))); }
  Rng substream(std::uint64_t index) const { return Rng(mix64(seed_, 0x5bf0a8b1u + index)); }

  std::uint64_t seed() const { return seed_; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t seed_;
  std::uint64_t s_[4];
};

// One-shot choice in [0, n) that is a pure function of its key. The default
// oracles are built on this so that replaying a life with the same seed and
// the same query arguments always yields the same answer.
inline std::uint64_t keyed_pick(std::uint64_t seed, std::uint64_t k1, std::uint64_t k2,
                                std::uint64_t k3, std::uint64_t n) {
  if (n <= 1) return 0;
  std::uint64_t x = mix64(mix64(mix64(seed, k1), k2), k3);
  return Rng(x).below(n);
}

inline double keyed_real01(std::uint64_t seed, std::uint64_t k1, std::uint64_t k2,
                           std::uint64_t k3) {
  std::uint64_t x = mix64(mix64(mix64(seed, k1), k2), k3);
  return Rng(x).real01();
}

}  // namespace onelife
