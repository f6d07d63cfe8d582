#pragma once

#include <cstdint>
#include <random>

namespace pact {

/// Seedable, splittable pseudorandom source. Streams are reproducible for a
/// given seed on a given standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Uniform in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

  /// Uniform in [0, 2^bits), bits in 0..64.
  std::uint64_t bits(unsigned bits) {
    if (bits == 0) return 0;
    std::uint64_t hi = bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
    return std::uniform_int_distribution<std::uint64_t>(0, hi)(engine_);
  }

  /// Independent child stream; advances this stream by one draw.
  Rng split() { return Rng(mix(engine_())); }

 private:
  // splitmix64 finaliser
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace pact
