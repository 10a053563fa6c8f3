#pragma once

#include <cstdint>

#include "otbcd/instance.hpp"

namespace otbcd {

/// Closed-form optimum for 1D squared cost with equal-size uniform marginals:
/// the sorted (monotone) coupling, (1/n) * sum_k (u_(k) - v_(k))^2.
/// Throws OracleUnsupported unless dim == 1 and n == m.
double oracle_1d_monotone(const SamplePair& samples);

/// Same, but also checks that `inst` carries uniform marginals.
double oracle_1d_monotone(const SamplePair& samples, const Instance& inst);

struct BruteForceOptimum {
  std::int64_t scaled = 0;  // optimum under the scaled integer costs
  double value = 0.0;       // descaled
  double true_value = 0.0;  // optimum under the unscaled costs
  std::int64_t feasible_bases = 0;
};

inline constexpr std::int64_t kBruteForceMaxArcs = 12;

/// Exhaustive search over all spanning-tree bases (n*m <= 12). Independent of
/// the network simplex code path.
BruteForceOptimum oracle_lp_bruteforce(const Instance& inst);

}  // namespace otbcd
