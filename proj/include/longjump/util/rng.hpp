#pragma once

#include <cstdint>

namespace longjump {

// Counter-based pseudo-random stream.
//
// Every (seed, walker, step) triple owns an independent substream; draws
// within the substream are indexed by an incrementing counter.  The value of
// draw j is a pure function mix(key, j), so simulation results depend only
// on the keying — never on thread scheduling or on how many draws another
// walker consumed.  The mixer is the splitmix64 finalizer over a Weyl
// sequence, which passes the usual statistical batteries.

namespace detail {
inline std::uint64_t splitmix64_fin(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}
}  // namespace detail

constexpr std::uint64_t kWeylGamma = 0x9E3779B97F4A7C15ull;

// Derives the substream key for (seed, walker, step).
inline std::uint64_t rng_key(std::uint64_t seed, std::uint64_t walker,
                             std::uint64_t step) {
  std::uint64_t k = detail::splitmix64_fin(seed + kWeylGamma);
  k = detail::splitmix64_fin(k ^ (walker + kWeylGamma));
  k = detail::splitmix64_fin(k ^ (step + 2 * kWeylGamma));
  return k;
}

class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key), ctr_(0) {}
  Rng(std::uint64_t seed, std::uint64_t walker, std::uint64_t step)
      : Rng(rng_key(seed, walker, step)) {}

  std::uint64_t next_u64() {
    return detail::splitmix64_fin(key_ + (ctr_++) * kWeylGamma);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n), n >= 1, by rejection (unbiased).
  std::uint64_t next_below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    for (;;) {
      std::uint64_t v = next_u64();
      if (v < limit) return v % n;
    }
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return ctr_; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_;
};

}  // namespace longjump
