#include "infocommit/rng.hpp"

#include <vector>
#include <limits>

namespace infocommit {

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::mt19937_64 seeded(std::initializer_list<std::uint64_t> words) {
  std::vector<std::uint32_t> parts;
  for (auto w : words) {
    parts.push_back(static_cast<std::uint32_t>(w));
    parts.push_back(static_cast<std::uint32_t>(w >> 32));
  }
  std::seed_seq seq(parts.begin(), parts.end());
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(seeded({seed})) {}

Rng Rng::derive(std::uint64_t master_seed, std::string_view label, std::uint64_t index) {
  return Rng(seeded({master_seed, fnv1a(label), index, 0x1c0aa17ULL}));
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Largest multiple of bound representable; draws above it are rejected.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
  for (;;) {
    const std::uint64_t draw = engine_();
    if (draw <= limit) return draw % bound;
  }
}

}  // namespace infocommit
