#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace frad {

using Rng = std::mt19937_64;

/// Independent generator for stream `index` of a run seeded with `seed`.
/// Streams for different indices (or different purposes) do not overlap in
/// practice, so per-row or per-tree work can run in any order.
inline Rng derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * path.size());
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto v : path) push(v);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

/// Uniform double in [0, 1) with 53 bits of randomness.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace frad
