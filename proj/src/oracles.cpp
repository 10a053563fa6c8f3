#include "otbcd/oracles.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <numeric>
#include <vector>

#include "otbcd/error.hpp"

namespace otbcd {

double oracle_1d_monotone(const SamplePair& samples) {
  if (samples.dim != 1) {
    fail(ErrorCode::kOracleUnsupported, "monotone oracle needs 1D samples");
  }
  if (samples.u.size() != samples.v.size() || samples.u.empty()) {
    fail(ErrorCode::kOracleUnsupported, "monotone oracle needs n == m uniform marginals");
  }
  std::vector<double> u = samples.u;
  std::vector<double> v = samples.v;
  std::sort(u.begin(), u.end());
  std::sort(v.begin(), v.end());
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double d = u[k] - v[k];
    acc += d * d;
  }
  return acc / static_cast<double>(u.size());
}

double oracle_1d_monotone(const SamplePair& samples, const Instance& inst) {
  const auto& p = inst.supplies();
  const auto& q = inst.demands();
  const bool uniform = std::all_of(p.begin(), p.end(), [&](auto x) { return x == p[0]; }) &&
                       std::all_of(q.begin(), q.end(), [&](auto x) { return x == q[0]; });
  if (!uniform) fail(ErrorCode::kOracleUnsupported, "monotone oracle needs uniform marginals");
  if (inst.n() != samples.n() || inst.m() != samples.m()) {
    fail(ErrorCode::kOracleUnsupported, "samples do not match instance");
  }
  return oracle_1d_monotone(samples);
}

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int size) : parent(static_cast<std::size_t>(size)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

// Tree flows by repeated leaf elimination: a leaf node's single arc must carry
// that node's entire remaining mass.
bool tree_flows(const Instance& inst, const std::vector<int>& arcs, std::vector<std::int64_t>& flow) {
  const int n = static_cast<int>(inst.n());
  const int nodes = static_cast<int>(inst.num_nodes());
  std::vector<std::int64_t> remaining(static_cast<std::size_t>(nodes));
  for (int i = 0; i < n; ++i) remaining[i] = inst.supply(i);
  for (int j = 0; j < inst.m(); ++j) remaining[n + j] = inst.demand(j);
  std::vector<int> degree(static_cast<std::size_t>(nodes), 0);
  std::vector<bool> done(arcs.size(), false);
  auto endpoints = [&](int a) {
    return std::pair<int, int>{static_cast<int>(inst.row(a)), n + static_cast<int>(inst.col(a))};
  };
  for (int a : arcs) {
    auto [s, d] = endpoints(a);
    ++degree[s];
    ++degree[d];
  }
  flow.assign(arcs.size(), 0);
  for (std::size_t left = arcs.size(); left > 0; --left) {
    bool progressed = false;
    for (std::size_t k = 0; k < arcs.size() && !progressed; ++k) {
      if (done[k]) continue;
      auto [s, d] = endpoints(arcs[k]);
      int leaf = degree[s] == 1 ? s : (degree[d] == 1 ? d : -1);
      if (leaf < 0) continue;
      const int other = leaf == s ? d : s;
      const std::int64_t f = remaining[leaf];
      flow[k] = f;
      remaining[leaf] = 0;
      remaining[other] -= f;
      --degree[s];
      --degree[d];
      done[k] = true;
      progressed = true;
    }
    if (!progressed) return false;
  }
  return std::all_of(flow.begin(), flow.end(), [](auto f) { return f >= 0; });
}

}  // namespace

BruteForceOptimum oracle_lp_bruteforce(const Instance& inst) {
  const std::int64_t arcs_total = inst.num_arcs();
  if (arcs_total > kBruteForceMaxArcs) {
    fail(ErrorCode::kOracleUnsupported, "brute force limited to n*m <= 12");
  }
  const int nodes = static_cast<int>(inst.num_nodes());
  const int basis_size = nodes - 1;

  BruteForceOptimum best;
  best.scaled = std::numeric_limits<std::int64_t>::max();
  best.true_value = std::numeric_limits<double>::infinity();

  std::vector<int> chosen;
  std::vector<std::int64_t> flow;
  for (std::uint32_t mask = 0; mask < (1u << arcs_total); ++mask) {
    if (std::popcount(mask) != basis_size) continue;
    chosen.clear();
    DisjointSets dsu(nodes);
    bool acyclic = true;
    for (int a = 0; a < arcs_total && acyclic; ++a) {
      if (!(mask & (1u << a))) continue;
      chosen.push_back(a);
      acyclic = dsu.unite(static_cast<int>(inst.row(a)),
                          static_cast<int>(inst.n() + inst.col(a)));
    }
    if (!acyclic) continue;
    if (!tree_flows(inst, chosen, flow)) continue;
    ++best.feasible_bases;
    std::int64_t scaled = 0;
    double real = 0.0;
    for (std::size_t k = 0; k < chosen.size(); ++k) {
      scaled += inst.scaled_cost(chosen[k]) * flow[k];
      real += inst.cost(chosen[k]) * static_cast<double>(flow[k]);
    }
    best.scaled = std::min(best.scaled, scaled);
    best.true_value = std::min(best.true_value, real / static_cast<double>(inst.total_mass()));
  }
  if (best.feasible_bases == 0) {
    fail(ErrorCode::kInvalidInstance, "no basic feasible solution found");
  }
  best.value = inst.descale(best.scaled);
  return best;
}

}  // namespace otbcd
