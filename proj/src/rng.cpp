#include "robloc/rng.hpp"

#include <cmath>

namespace robloc {
namespace {

constexpr std::uint64_t Rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t SplitMix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(RngSeed seed) {
  std::uint64_t sm = seed.value;
  for (auto& word : s_) {
    word = SplitMix64(sm);
  }
}

Rng Rng::Stream(RngSeed seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t mix = seed.value;
  std::uint64_t h = SplitMix64(mix);
  mix = h ^ (a * 0xd1342543de82ef95ULL);
  h = SplitMix64(mix);
  mix = h ^ (b * 0xaf251af3b0f025b5ULL);
  return Rng(RngSeed{SplitMix64(mix)});
}

std::uint64_t Rng::Next() {
  const std::uint64_t result = Rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = Rotl(s_[3], 45);
  return result;
}

double Rng::Uniform01() {
  // 53 random bits, shifted by half an ulp so neither 0 nor 1 is produced.
  return (static_cast<double>(Next() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }

double Rng::Exponential() { return -std::log(Uniform01()); }

}  // namespace robloc
