#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace msol {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent named streams derived from one seed.
enum class StreamPurpose : std::uint64_t {
  kPerturbation = 1,
  kSampling = 2,
  kAdversary = 3,
  kMonteCarlo = 4,
};

// Engine for (seed, index, purpose). Each round of a game gets its own
// engine, so changing how one round consumes randomness leaves all other
// rounds' draws intact.
inline std::mt19937_64 derived_engine(std::uint64_t seed, std::uint64_t index,
                                      StreamPurpose purpose) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  h = splitmix64(h ^ index);
  std::seed_seq seq{static_cast<std::uint32_t>(h),
                    static_cast<std::uint32_t>(h >> 32)};
  return std::mt19937_64(seq);
}

// Sum of m independent uniform signs.
inline long long rademacher_sum(std::mt19937_64& rng, std::uint64_t m) {
  long long ones = 0;
  std::uint64_t left = m;
  while (left >= 64) {
    ones += std::popcount(rng());
    left -= 64;
  }
  if (left > 0) {
    const std::uint64_t mask = (std::uint64_t{1} << left) - 1;
    ones += std::popcount(rng() & mask);
  }
  return 2 * ones - static_cast<long long>(m);
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace msol
