#pragma once

#include <cstdint>
#include <random>

namespace d2d {

// Seeded random source. Variates are derived from raw 64-bit engine output
// with explicit transforms so traces are byte-stable across standard
// libraries (std::*_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  double exponential(double mean);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

// Mixes a base seed with an index (splitmix64 finalizer). Used to derive
// independent yet reproducible child streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace d2d
