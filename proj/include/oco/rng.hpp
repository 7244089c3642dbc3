#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace oco {

// splitmix64 step; used to derive independent seeds from (seed, salt) pairs.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic stream wrapper. Uniform and normal draws are generated from
// raw engine words rather than std:: distributions so that replays consume a
// fixed number of engine states per call on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return eng_(); }

  // [0, 1)
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; consumes exactly two engine words per call.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  Rng child(std::uint64_t salt) const { return Rng(mix_seed(seed_, salt)); }

 private:
  std::mt19937_64 eng_;
  std::uint64_t seed_;
};

}  // namespace oco
