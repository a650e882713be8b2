#ifndef SEAFLOOR_RANDOM_HPP
#define SEAFLOOR_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace seafloor {

// Portable random streams. The standard <random> distributions are
// implementation-defined, so every draw here is derived from raw 64-bit
// output to keep seeded results identical across toolchains.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Order-sensitive hash of a seed and a list of counters.
constexpr std::uint64_t mix_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632BE59BD9B4E019ULL));
  return h;
}

/// Uniform double in [0, 1) from a 64-bit word.
constexpr double to_unit(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Small sequential generator (xoshiro256**), seeded through splitmix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept {
    std::uint64_t s = seed;
    for (auto& word : state_) {
      s = splitmix64(s);
      word = s;
    }
  }

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  double uniform() noexcept { return to_unit(next()); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t threshold = (0 - n) % n;  // rejects the biased low range
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  /// Exponential variate with mean 1.
  double exponential() noexcept { return -std::log1p(-uniform()); }

  /// Standard normal variate (Box-Muller, one value per call).
  double normal() noexcept {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  /// Poisson variate; large means are split into chunks so inversion stays exact.
  std::uint64_t poisson(double mean) noexcept {
    std::uint64_t total = 0;
    while (mean > 0.0) {
      const double chunk = mean > 20.0 ? 20.0 : mean;
      mean -= chunk;
      double p = std::exp(-chunk);
      double cdf = p;
      const double u = uniform();
      std::uint64_t k = 0;
      while (u > cdf && k < 1000) {
        ++k;
        p *= chunk / static_cast<double>(k);
        cdf += p;
      }
      total += k;
    }
    return total;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4]{};
};

}  // namespace seafloor

#endif  // SEAFLOOR_RANDOM_HPP
