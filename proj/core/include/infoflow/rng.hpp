#pragma once

#include <cstdint>
#include <random>

namespace infoflow {

/// Engine used by every generator: std::mt19937_64. Streams are split per
/// market by hashing (seed, index) through SplitMix64, so market i's draws
/// do not depend on how many markets precede it or on thread scheduling.
using Rng = std::mt19937_64;

/// One SplitMix64 step; advances state.
std::uint64_t splitmix64(std::uint64_t& state);

/// Independent child seed for stream `index` of a root seed.
std::uint64_t split_seed(std::uint64_t root, std::uint64_t index);

inline Rng make_rng(std::uint64_t root, std::uint64_t index) {
  return Rng(split_seed(root, index));
}

}  // namespace infoflow
