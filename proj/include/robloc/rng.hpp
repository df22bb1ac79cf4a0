#pragma once

#include <array>
#include <cstdint>

namespace robloc {

struct RngSeed {
  std::uint64_t value = 0;
};

// xoshiro256** seeded through splitmix64. The output sequence depends only on
// the seed, so measurement streams are identical across platforms and
// standard-library implementations.
class Rng {
 public:
  explicit Rng(RngSeed seed);

  // Independent stream for (seed, a, b), e.g. (seed, sweep point, run index).
  static Rng Stream(RngSeed seed, std::uint64_t a, std::uint64_t b = 0);

  std::uint64_t Next();

  // Uniform in the open interval (0, 1).
  double Uniform01();
  double Uniform(double lo, double hi);
  // Exp(1) variate.
  double Exponential();

 private:
  std::array<std::uint64_t, 4> s_{};
};

std::uint64_t SplitMix64(std::uint64_t& state);

}  // namespace robloc
