#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "otbcd/bcdns.hpp"
#include "otbcd/error.hpp"
#include "otbcd/network_simplex.hpp"
#include "otbcd/oracles.hpp"

using namespace otbcd;
using otbcd::testing::matrix;
using otbcd::testing::uniform_matrix;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected otbcd::Error");
  return ErrorCode::kInvalidInput;
}

Instance sampled(std::int64_t n, std::uint64_t seed, const char* problem = "uniform-normal",
                 int dim = 1) {
  return Instance::from_samples(generate_samples(parse_problem(problem, dim), n, seed));
}

// Union-find spanning-tree check, independent of SimplexState's own links.
bool is_spanning_tree(const Instance& inst, const std::vector<ArcId>& arcs) {
  const auto nodes = inst.num_nodes();
  if (static_cast<std::int64_t>(arcs.size()) != nodes - 1) return false;
  std::vector<std::int64_t> up(static_cast<std::size_t>(nodes));
  std::iota(up.begin(), up.end(), 0);
  auto find = [&](std::int64_t x) {
    while (up[x] != x) x = up[x] = up[up[x]];
    return x;
  };
  for (auto a : arcs) {
    const auto x = find(inst.row(a));
    const auto y = find(inst.n() + inst.col(a));
    if (x == y) return false;
    up[x] = y;
  }
  return true;
}

std::int64_t full_min_reduced_cost(SimplexState& s) {
  std::vector<std::int64_t> r(static_cast<std::size_t>(s.instance().num_arcs()));
  s.price_all(r);
  return *std::min_element(r.begin(), r.end());
}

}  // namespace

TEST_CASE("northwest corner on a 2x2 with distinct marginals") {
  const auto inst = matrix(2, 2, {0, 0, 0, 0}, {3, 2}, {1, 4});
  const auto s = northwest_corner(inst);
  CHECK(s.flow(inst.arc(0, 0)) == 1);
  CHECK(s.flow(inst.arc(0, 1)) == 2);
  CHECK(s.flow(inst.arc(1, 1)) == 2);
  CHECK(s.basis() == std::vector<ArcId>{inst.arc(0, 0), inst.arc(0, 1), inst.arc(1, 1)});
  CHECK(s.validate().empty());
}

TEST_CASE("northwest corner adds a zero arc on a simultaneous exhaustion") {
  const auto inst = uniform_matrix(2, {0, 0, 0, 0});
  const auto s = northwest_corner(inst);
  CHECK(s.basis_size() == 3);
  CHECK(s.flow(inst.arc(0, 0)) == 1);
  CHECK(s.flow(inst.arc(1, 1)) == 1);
  CHECK(s.basis() == std::vector<ArcId>{inst.arc(0, 0), inst.arc(0, 1), inst.arc(1, 1)});
  CHECK(s.flow(inst.arc(0, 1)) == 0);
  CHECK(s.plan().entries.size() == 2);
  CHECK(s.plan(true).entries.size() == 3);
}

TEST_CASE("northwest corner staircase on 5x5 uniform") {
  const auto inst = uniform_matrix(5, std::vector<double>(25, 1.0));
  const auto s = northwest_corner(inst);
  CHECK(s.basis_size() == 9);
  std::vector<ArcId> expected;
  for (std::int64_t i = 0; i < 5; ++i) {
    expected.push_back(inst.arc(i, i));
    if (i + 1 < 5) expected.push_back(inst.arc(i, i + 1));
  }
  std::sort(expected.begin(), expected.end());
  CHECK(s.basis() == expected);
  CHECK(check_feasibility(s.plan(), inst).feasible);
  CHECK(is_spanning_tree(inst, s.basis()));
}

TEST_CASE("northwest corner is a feasible spanning tree on rectangular instances") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = otbcd::testing::random_integer_instance(2 + seed % 5, 1 + seed % 7, seed);
    const auto s = northwest_corner(inst);
    CHECK(is_spanning_tree(inst, s.basis()));
    CHECK(s.feasible());
    CHECK(s.validate().empty());
  }
}

TEST_CASE("potentials on the hand-solved 2x2 tree") {
  const auto inst = uniform_matrix(2, {0, 1, 5, 0});
  const std::vector<ArcId> basis{inst.arc(0, 0), inst.arc(0, 1), inst.arc(1, 1)};
  const auto pot = compute_potentials(basis, inst);
  CHECK(pot.pi == std::vector<std::int64_t>{0, -1, 0, -1});
  CHECK(pot.operations == inst.num_nodes());

  SimplexState s(inst, basis, std::vector<std::int64_t>{1, 0, 1});
  CHECK(std::equal(pot.pi.begin(), pot.pi.end(), s.potentials().begin()));
  CHECK(s.reduced_cost(inst.arc(1, 0)) == 6);
  for (auto a : basis) CHECK(s.reduced_cost(a) == 0);
  CHECK(s.counters().evaluations == 4);
}

TEST_CASE("reduced cost arithmetic") {
  // c = 3 on arc (0, 0) with pi_0 = 0, pi_{n+0} = -3 gives r = 0 (basic);
  // a nonbasic arc of cost 3 between nodes with pi = 1 and -1 gives 1.
  const auto inst = matrix(2, 2, {0, 2, 3, 3}, {1, 1}, {1, 1});
  // Tree: (0,0) c=0, (0,1) c=2, (1,0) c=3 -> pi_s0 = 0, pi_d0 = 0, pi_d1 = -2, pi_s1 = 3.
  const std::vector<ArcId> basis{inst.arc(0, 0), inst.arc(0, 1), inst.arc(1, 0)};
  SimplexState s(inst, basis, std::vector<std::int64_t>{0, 1, 1});
  // r(1,1) = 3 - (3 - (-2)) = -2
  CHECK(s.reduced_cost(inst.arc(1, 1)) == -2);
}

TEST_CASE("zero costs give zero potentials for any basis") {
  const auto inst = uniform_matrix(3, std::vector<double>(9, 0.0));
  const auto s = northwest_corner(inst);
  const auto pot = compute_potentials(s.basis(), inst);
  CHECK(std::all_of(pot.pi.begin(), pot.pi.end(), [](auto x) { return x == 0; }));
}

TEST_CASE("shifting every cost by K shifts demand potentials by -K") {
  const auto base = otbcd::testing::random_integer_instance(3, 4, 5);
  std::vector<double> shifted(base.costs().begin(), base.costs().end());
  for (auto& c : shifted) c += 7;
  const auto other = Instance::from_matrix(3, 4, shifted,
                                           {base.supplies().begin(), base.supplies().end()},
                                           {base.demands().begin(), base.demands().end()}, 1);
  const auto basis = northwest_corner(base).basis();
  const auto a = compute_potentials(basis, base).pi;
  const auto b = compute_potentials(basis, other).pi;
  for (std::int64_t i = 0; i < 3; ++i) CHECK(b[i] == a[i]);
  for (std::int64_t j = 0; j < 4; ++j) CHECK(b[3 + j] == a[3 + j] - 7);
}

TEST_CASE("compute_potentials rejects arc sets that are not spanning trees") {
  const auto inst = uniform_matrix(2, {0, 1, 1, 0});
  const std::vector<ArcId> too_few{inst.arc(0, 0), inst.arc(1, 1)};
  CHECK(code_of([&] { compute_potentials(too_few, inst); }) == ErrorCode::kInvalidBasis);
  const auto cyc = uniform_matrix(3, std::vector<double>(9, 0.0));
  // 5 arcs on 6 nodes containing the cycle s0-d0-s1-d1-s0; s2, d2 disconnected.
  const std::vector<ArcId> cycle{cyc.arc(0, 0), cyc.arc(0, 1), cyc.arc(1, 0), cyc.arc(1, 1),
                                 cyc.arc(2, 2)};
  CHECK(code_of([&] { compute_potentials(cycle, cyc); }) == ErrorCode::kInvalidBasis);
  const std::vector<ArcId> out_of_range{0, 1, 99};
  CHECK(code_of([&] { compute_potentials(out_of_range, inst); }) == ErrorCode::kInvalidBasis);
}

TEST_CASE("hand-traced pivot on cost [[1,0],[0,1]]") {
  const auto inst = uniform_matrix(2, {1, 0, 0, 1});
  auto s = northwest_corner(inst);
  CHECK(s.objective() == 2);
  const auto entering = inst.arc(1, 0);
  CHECK(s.reduced_cost(entering) == -2);
  const auto out = s.pivot(entering);
  CHECK(out.delta == 1);
  CHECK(out.leaving == inst.arc(0, 0));  // (0,0) and (1,1) tie; smaller index leaves
  CHECK(out.objective_before == 2);
  CHECK(out.objective_after == 0);
  CHECK(s.objective() == 0);
  CHECK(s.flow(inst.arc(1, 0)) == 1);
  CHECK(s.flow(inst.arc(0, 1)) == 1);
  CHECK(s.flow(inst.arc(1, 1)) == 0);
  CHECK(s.is_basic(inst.arc(1, 1)));
  CHECK(s.validate().empty());
  CHECK(full_min_reduced_cost(s) >= 0);
}

TEST_CASE("degenerate pivot changes the basis but not the plan") {
  // The NWC superdiagonal arcs carry zero flow; the cycle of (0,2) runs
  // through (0,1) and (1,2), both empty, so Delta = 0.
  const auto inst = uniform_matrix(3, {0, 5, 5, 5, 0, 5, 5, 5, 0});
  auto s = northwest_corner(inst);
  const auto before = s.plan();
  const auto obj = s.objective();
  const auto basis = s.basis();
  const auto out = s.pivot(inst.arc(0, 2));
  CHECK(out.delta == 0);
  CHECK(out.leaving == inst.arc(0, 1));
  CHECK(s.plan().entries == before.entries);
  CHECK(s.objective() == obj);
  CHECK(s.basis() != basis);
  CHECK(s.counters().degenerate_pivots == 1);
  CHECK(s.validate().empty());
}

TEST_CASE("pivot rejects basic and out-of-range arcs") {
  const auto inst = uniform_matrix(2, {1, 0, 0, 1});
  auto s = northwest_corner(inst);
  CHECK(code_of([&] { s.pivot(inst.arc(0, 0)); }) == ErrorCode::kInvalidPivot);
  CHECK(code_of([&] { s.pivot(4); }) == ErrorCode::kInvalidPivot);
}

TEST_CASE("every pivot keeps the tree, potentials, feasibility and monotone objective") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto inst = sampled(12, seed, seed % 2 ? "uniform-normal" : "normal-mixture", 1 + seed % 2);
    auto s = northwest_corner(inst);
    SimplexOptions opt;
    opt.check_invariants = true;
    std::int64_t last = s.objective();
    bool monotone = true;
    bool strict = true;
    opt.on_pivot = [&](const PivotOutcome& p) {
      monotone = monotone && p.objective_after <= last;
      if (p.delta > 0) strict = strict && p.objective_after < p.objective_before;
      last = p.objective_after;
    };
    const auto rep = solve_full(s, opt);
    CHECK(monotone);
    CHECK(strict);
    CHECK(rep.optimal);
    CHECK(is_spanning_tree(inst, s.basis()));
    CHECK(check_feasibility(s.plan(), inst).feasible);
    CHECK(s.validate().empty());
    CHECK(full_min_reduced_cost(s) >= 0);
  }
}

TEST_CASE("already optimal start takes no pivots") {
  const auto inst = uniform_matrix(2, {0, 1, 1, 0});
  auto s = northwest_corner(inst);
  const auto rep = solve_full(s);
  CHECK(rep.pivots == 0);
  CHECK(rep.optimal);
  CHECK(s.objective() == 0);
}

TEST_CASE("full solve matches the brute-force oracle") {
  CHECK([] {
    const auto inst = uniform_matrix(2, {1, 0, 0, 1});
    auto s = northwest_corner(inst);
    solve_full(s);
    return s.objective() == oracle_lp_bruteforce(inst).scaled && s.objective() == 0;
  }());
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const std::int64_t n = 1 + seed % 4;
    const std::int64_t m = std::max<std::int64_t>(1, 12 / n - seed % 2);
    const auto inst = otbcd::testing::random_integer_instance(n, m, seed + 100);
    auto s = northwest_corner(inst);
    solve_full(s);
    CHECK(s.objective() == oracle_lp_bruteforce(inst).scaled);
  }
}

TEST_CASE("both pricing rules reach the same optimum") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto inst = sampled(10, seed);
    auto a = northwest_corner(inst);
    auto b = northwest_corner(inst);
    SimplexOptions bland;
    bland.pricing = PricingRule::kBland;
    const auto ra = solve_full(a, bland);
    const auto rb = solve_full(b);
    CHECK(a.objective() == b.objective());
    CHECK(ra.bland_pivots == ra.pivots);
    CHECK(rb.pricing == PricingRule::kMostNegative);
  }
}

TEST_CASE("a shifted instance has the same optimal plans") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto base = otbcd::testing::random_integer_instance(4, 5, seed);
    std::vector<double> shifted(base.costs().begin(), base.costs().end());
    for (auto& c : shifted) c += 11;
    const std::vector<std::int64_t> p(base.supplies().begin(), base.supplies().end());
    const std::vector<std::int64_t> q(base.demands().begin(), base.demands().end());
    const auto other = Instance::from_matrix(4, 5, shifted, p, q, 1);
    auto s = northwest_corner(other);
    solve_full(s);
    // Replay the shifted optimum on the original costs and certify it there.
    std::vector<ArcId> arcs = s.basis();
    std::vector<std::int64_t> flows;
    for (auto a : arcs) flows.push_back(s.flow(a));
    SimplexState replay(base, arcs, flows);
    CHECK(certify_optimal(replay).optimal());
    CHECK(s.objective() == replay.objective() + 11 * base.total_mass());
  }
}

TEST_CASE("restricted solve over every arc equals the full solve") {
  const auto inst = sampled(9, 4);
  auto a = northwest_corner(inst);
  auto b = northwest_corner(inst);
  solve_full(a);
  std::vector<ArcId> all(static_cast<std::size_t>(inst.num_arcs()));
  std::iota(all.begin(), all.end(), 0);
  const auto res = solve_restricted(b, all);
  CHECK(a.objective() == b.objective());
  CHECK(res.report.optimal);
  CHECK(res.working_set.size() == all.size());
  CHECK(std::all_of(res.reduced_costs.begin(), res.reduced_costs.end(),
                    [](auto r) { return r >= 0; }));
}

TEST_CASE("restricted solve over the basis alone is the zero direction") {
  const auto inst = sampled(6, 2);
  auto s = northwest_corner(inst);
  const auto plan = s.plan(true).entries;
  const auto res = solve_restricted(s, s.basis());
  CHECK(res.report.pivots == 0);
  CHECK(s.plan(true).entries == plan);
}

TEST_CASE("restricted solve on the 2x2 example") {
  const auto inst = uniform_matrix(2, {1, 0, 0, 1});
  auto s = northwest_corner(inst);
  auto h = s.basis();
  h.push_back(inst.arc(1, 0));
  solve_restricted(s, h);
  CHECK(s.objective() == 0);
}

TEST_CASE("restricted solve never prices or moves arcs outside the working set") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto inst = sampled(15, seed, "normal-mixture");
    auto s = northwest_corner(inst);
    const auto x0 = s.plan(true);
    std::vector<ArcId> h = s.basis();
    std::mt19937_64 rng(seed);
    for (int k = 0; k < 40; ++k) h.push_back(static_cast<ArcId>(rng() % inst.num_arcs()));
    std::sort(h.begin(), h.end());
    h.erase(std::unique(h.begin(), h.end()), h.end());
    std::vector<char> in_h(static_cast<std::size_t>(inst.num_arcs()), 0);
    for (auto a : h) in_h[a] = 1;

    bool stays_inside = true;
    SimplexOptions opt;
    opt.on_pivot = [&](const PivotOutcome& p) { stays_inside = stays_inside && in_h[p.entering]; };
    const auto before = s.counters().evaluations;
    const auto res = solve_restricted(s, h, opt);
    const auto evals = s.counters().evaluations - before;
    CHECK(stays_inside);
    CHECK(evals <= (res.report.pivots + 1) * static_cast<std::int64_t>(h.size()));
    CHECK(res.report.evaluations == evals);

    // Direction d = x_out - x_in is zero outside H and conserves every marginal.
    std::vector<std::int64_t> d(static_cast<std::size_t>(inst.num_arcs()), 0);
    for (const auto& e : s.plan().entries) d[inst.arc(e.i, e.j)] += e.mass;
    for (const auto& e : x0.entries) d[inst.arc(e.i, e.j)] -= e.mass;
    for (ArcId a = 0; a < inst.num_arcs(); ++a) {
      if (!in_h[a]) CHECK(d[a] == 0);
    }
    for (std::int64_t i = 0; i < inst.n(); ++i) {
      std::int64_t row = 0;
      for (std::int64_t j = 0; j < inst.m(); ++j) row += d[inst.arc(i, j)];
      CHECK(row == 0);
    }
    for (auto r : res.reduced_costs) CHECK(r >= 0);
    for (auto a : s.basis()) CHECK(in_h[a]);
  }
}

TEST_CASE("restricted solve rejects a working set missing a basic arc") {
  const auto inst = sampled(4, 1);
  auto s = northwest_corner(inst);
  auto h = s.basis();
  h.pop_back();
  CHECK(code_of([&] { solve_restricted(s, h); }) == ErrorCode::kSuccessionViolation);
  std::vector<ArcId> bad = s.basis();
  bad.push_back(inst.num_arcs());
  CHECK(code_of([&] { solve_restricted(s, bad); }) == ErrorCode::kInvalidInput);
}

TEST_CASE("pricing names") {
  CHECK(parse_pricing("bland") == PricingRule::kBland);
  CHECK(parse_pricing("most-negative") == PricingRule::kMostNegative);
  CHECK(to_string(PricingRule::kBland) == "bland");
  CHECK(code_of([] { parse_pricing("steepest"); }) == ErrorCode::kInvalidConfig);
}

TEST_CASE("max_pivots stops a run early without certifying it") {
  const auto inst = sampled(20, 3);
  auto s = northwest_corner(inst);
  SimplexOptions opt;
  opt.max_pivots = 2;
  const auto rep = solve_full(s, opt);
  CHECK(rep.pivots == 2);
  CHECK_FALSE(rep.optimal);
}

TEST_CASE("degenerate streaks fall back to Bland and still terminate") {
  // All costs tied in blocks and all masses equal: heavily degenerate.
  const std::int64_t n = 12;
  std::vector<double> cost(static_cast<std::size_t>(n * n));
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) cost[i * n + j] = static_cast<double>((i + j) % 3);
  }
  const auto inst = uniform_matrix(n, cost);
  auto s = northwest_corner(inst);
  SimplexOptions opt;
  opt.degenerate_streak_limit = 2;
  opt.check_invariants = true;
  const auto rep = solve_full(s, opt);
  CHECK(rep.optimal);
  CHECK(rep.pivots <= 10 * inst.num_arcs());
  CHECK(full_min_reduced_cost(s) >= 0);
}
