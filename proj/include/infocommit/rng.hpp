#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace infocommit {

// Seeded random stream. Substreams are derived from a master seed and a
// (label, index) pair so that independent consumers never share state and
// every run is reproducible.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static Rng derive(std::uint64_t master_seed, std::string_view label, std::uint64_t index = 0);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform in [0, bound) by rejection; bound > 0.
  std::uint64_t uniform(std::uint64_t bound);
  bool bit() { return (engine_() >> 63) != 0; }

  // A fresh 64-bit seed for a child stream.
  std::uint64_t fork_seed() { return engine_(); }

 private:
  explicit Rng(std::mt19937_64 engine) : engine_(engine) {}
  std::mt19937_64 engine_;
};

}  // namespace infocommit
