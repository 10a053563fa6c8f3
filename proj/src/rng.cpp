#include "otbcd/rng.hpp"

#include <array>

namespace otbcd {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
  std::uint64_t state = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream)));
  std::array<std::uint64_t, 4> words{};
  for (auto& w : words) {
    state = splitmix64(state);
    w = state;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(words[0]), static_cast<std::uint32_t>(words[0] >> 32),
                    static_cast<std::uint32_t>(words[1]), static_cast<std::uint32_t>(words[1] >> 32),
                    static_cast<std::uint32_t>(words[2]), static_cast<std::uint32_t>(words[2] >> 32),
                    static_cast<std::uint32_t>(words[3]), static_cast<std::uint32_t>(words[3] >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace otbcd
