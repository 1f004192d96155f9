#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace satrag {

// Uniform draw in [0, bound) without modulo bias. Unlike the standard
// distributions, the sequence is the same under every standard library.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = kMax - kMax % bound;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % bound;
}

}  // namespace satrag
