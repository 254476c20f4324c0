#pragma once

#include <cstdint>
#include <random>

namespace sfork {

// Seeded random source with deterministic stream splitting. A split child
// depends only on (parent seed, stream id), never on how much the parent has
// been consumed, so per-trial streams are reproducible regardless of
// evaluation order.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : seed_(seed), gen_(mix(seed)) {}

  // Uniform draw in the open interval (0,1).
  double uniform() {
    const std::uint64_t bits = gen_() >> 11;  // top 53 bits
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t seed() const { return seed_; }

  SplitRng split(std::uint64_t stream) const {
    return SplitRng(mix(seed_ + (stream + 1) * 0x9e3779b97f4a7c15ull));
  }

  std::mt19937_64 &engine() { return gen_; }

 private:
  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace sfork
