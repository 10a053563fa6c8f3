#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace otbcd {

// Named substreams so that, e.g., block selection never perturbs sampling.
enum class Stream : std::uint64_t {
  kSourceSamples = 1,
  kTargetSamples = 2,
  kBlockSelection = 3,
  kShuffle = 4,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seeds a 64-bit Mersenne twister from (seed, stream) through SplitMix64.
std::mt19937_64 make_rng(std::uint64_t seed, Stream stream);

}  // namespace otbcd
