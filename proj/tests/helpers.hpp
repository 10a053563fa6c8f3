#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "otbcd/instance.hpp"

namespace otbcd::testing {

// Raw-matrix instance; scale 1 keeps hand-computed scaled costs readable.
inline Instance matrix(std::int64_t n, std::int64_t m, std::vector<double> cost,
                       std::vector<std::int64_t> p, std::vector<std::int64_t> q,
                       std::int64_t scale = 1) {
  return Instance::from_matrix(n, m, std::move(cost), std::move(p), std::move(q), scale);
}

inline Instance uniform_matrix(std::int64_t n, std::vector<double> cost, std::int64_t scale = 1) {
  return matrix(n, n, std::move(cost), std::vector<std::int64_t>(n, 1),
                std::vector<std::int64_t>(n, 1), scale);
}

// Random integer costs and random positive integer marginals with equal totals.
inline Instance random_integer_instance(std::int64_t n, std::int64_t m, std::uint64_t seed,
                                        int max_cost = 9, int max_mass = 4) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> c(0, max_cost);
  std::uniform_int_distribution<int> w(1, max_mass);
  std::vector<double> cost(static_cast<std::size_t>(n * m));
  for (auto& x : cost) x = c(rng);
  std::vector<std::int64_t> p(static_cast<std::size_t>(n));
  std::vector<std::int64_t> q(static_cast<std::size_t>(m));
  for (auto& x : p) x = w(rng);
  for (auto& x : q) x = w(rng);
  std::int64_t sp = 0;
  std::int64_t sq = 0;
  for (auto x : p) sp += x;
  for (auto x : q) sq += x;
  // Scale both sides to the common total sp * sq.
  for (auto& x : p) x *= sq;
  for (auto& x : q) x *= sp;
  return Instance::from_matrix(n, m, std::move(cost), std::move(p), std::move(q), 1);
}

}  // namespace otbcd::testing
