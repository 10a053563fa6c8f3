#include "otbcd/bcdns.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "otbcd/error.hpp"
#include "otbcd/rng.hpp"

namespace otbcd {

ThresholdSchedule ThresholdSchedule::constant(std::int64_t e) {
  ThresholdSchedule s;
  s.name = "constant:" + std::to_string(e);
  s.value = [e](std::int64_t) { return e; };
  return s;
}

BlockConfig BlockConfig::defaults_for(std::int64_t n) {
  BlockConfig c;
  const double nn = static_cast<double>(std::max<std::int64_t>(n, 1));
  c.s = std::min(2.0 / nn, 0.5);
  c.t = std::min(20.0 / nn, 1.0);
  return c;
}

void BlockConfig::validate(bool grouped) const {
  if (block_size < 0) fail(ErrorCode::kInvalidConfig, "block size must be nonnegative");
  if (block_size == 0 && !(s > 0.0 && s < 1.0)) {
    fail(ErrorCode::kInvalidConfig, "s must lie in (0,1)");
  }
  if (grouped) {
    if (!(t > 0.0 && t <= 1.0)) fail(ErrorCode::kInvalidConfig, "t must lie in (0,1]");
    if (block_size == 0 && !(s < t)) fail(ErrorCode::kInvalidConfig, "need s < t");
    if (!(exploration >= 0.0)) fail(ErrorCode::kInvalidConfig, "exploration must be >= 0");
  }
  if (resample_cap < 1) fail(ErrorCode::kInvalidConfig, "resample cap must be >= 1");
}

namespace {

// ceil(f * N), forgiving the rounding noise in products like 0.1 * 0.2 * N.
std::int64_t ceil_count(double f, std::int64_t num_arcs) {
  return static_cast<std::int64_t>(std::ceil(f * static_cast<double>(num_arcs) - 1e-9));
}

}  // namespace

std::int64_t BlockConfig::block_count(std::int64_t num_arcs) const {
  if (block_size > 0) return block_size;
  return std::max<std::int64_t>(1, ceil_count(s, num_arcs));
}

std::int64_t BlockConfig::screen_count(std::int64_t num_arcs) const {
  return std::max<std::int64_t>(1, ceil_count(t, num_arcs));
}

std::int64_t BlockConfig::explore_count(std::int64_t num_arcs) const {
  return ceil_count(exploration * t, num_arcs);
}

std::int64_t OuterReport::monotonicity_violations() const {
  std::int64_t count = 0;
  std::int64_t prev = initial_objective;
  for (const auto& it : iterations) {
    if (it.objective > prev) ++count;
    prev = it.objective;
  }
  return count;
}

std::vector<ArcId> negative_set(SimplexState& state, std::span<const ArcId> candidates) {
  std::vector<ArcId> out;
  for (ArcId a : candidates) {
    if (state.reduced_cost(a) < 0) out.push_back(a);
  }
  return out;
}

namespace {

struct FullScan {
  Certificate certificate;
  std::vector<ArcId> negatives;
};

FullScan full_scan(SimplexState& state, bool collect) {
  FullScan scan;
  scan.certificate.min_reduced_cost = std::numeric_limits<std::int64_t>::max();
  const auto num_arcs = state.instance().num_arcs();
  for (ArcId a = 0; a < num_arcs; ++a) {
    const auto r = state.reduced_cost(a);
    if (r < scan.certificate.min_reduced_cost) {
      scan.certificate.min_reduced_cost = r;
      scan.certificate.arc = a;
    }
    if (collect && r < 0) scan.negatives.push_back(a);
  }
  if (num_arcs == 0) scan.certificate.min_reduced_cost = 0;
  return scan;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<ArcId> with_basis(const SimplexState& state, const std::vector<ArcId>& block) {
  std::vector<ArcId> h = state.basis();
  h.insert(h.end(), block.begin(), block.end());
  return h;
}

void check_direction(const TransportPlan& before, const SimplexState& after,
                     const std::vector<ArcId>& working_set) {
  // d = x_after - x_before must vanish outside H; conservation follows from
  // both plans being feasible, which validate() checks.
  for (const auto& e : before.entries) {
    const ArcId a = after.instance().arc(e.i, e.j);
    if (e.mass != after.flow(a) && !std::binary_search(working_set.begin(), working_set.end(), a)) {
      throw std::logic_error("direction nonzero outside the working set at arc " + std::to_string(a));
    }
  }
  for (const auto& e : after.plan().entries) {
    const ArcId a = after.instance().arc(e.i, e.j);
    if (!std::binary_search(working_set.begin(), working_set.end(), a) && e.mass != before.mass(e.i, e.j)) {
      throw std::logic_error("direction nonzero outside the working set at arc " + std::to_string(a));
    }
  }
}

// Runs one subproblem on H = B_k u I_k and appends the iteration record.
RestrictedResult solve_block(SimplexState& state, const std::vector<ArcId>& block,
                             const BlockConfig& config, OuterReport& report,
                             std::int64_t evals_before, std::int64_t rounds,
                             Clock::time_point start) {
  std::int64_t block_min = std::numeric_limits<std::int64_t>::max();
  if (config.check_invariants) {
    // Recomputed from the potentials directly so the counters stay untouched.
    const auto& inst = state.instance();
    const auto pi = state.potentials();
    for (ArcId a : block) {
      const auto r = inst.scaled_cost(a) - (pi[static_cast<std::size_t>(inst.row(a))] -
                                            pi[static_cast<std::size_t>(inst.n() + inst.col(a))]);
      block_min = std::min(block_min, r);
    }
    if (block_min >= 0) throw std::logic_error("block holds no negative reduced cost");
  }
  const auto before = config.check_invariants ? state.plan() : TransportPlan{};
  auto result = solve_restricted(state, with_basis(state, block), config.subproblem);
  if (config.check_invariants) {
    if (auto problem = state.validate(); !problem.empty()) throw std::logic_error(problem);
    check_direction(before, state, result.working_set);
  }
  OuterIteration it;
  it.k = static_cast<std::int64_t>(report.iterations.size());
  it.working_set = static_cast<std::int64_t>(result.working_set.size());
  it.block = static_cast<std::int64_t>(block.size());
  it.block_min_reduced_cost = config.check_invariants ? block_min : 0;
  it.pivots = result.report.pivots;
  it.evaluations = state.counters().evaluations - evals_before;
  it.screening_rounds = rounds;
  it.objective = state.objective();
  it.seconds = seconds_since(start);
  const auto prev = report.iterations.empty() ? report.initial_objective
                                              : report.iterations.back().objective;
  if (it.objective > prev) {
    throw std::logic_error("outer objective increased at iteration " + std::to_string(it.k));
  }
  report.iterations.push_back(it);
  report.pivots += it.pivots;
  if (config.on_iteration) config.on_iteration(it, state);
  return result;
}

void finish(OuterReport& report, const SimplexState& state, Clock::time_point start) {
  report.outer_iterations = static_cast<std::int64_t>(report.iterations.size());
  report.evaluations = state.counters().evaluations;
  report.objective = state.objective();
  report.seconds = seconds_since(start);
}

}  // namespace

Certificate certify_optimal(SimplexState& state) { return full_scan(state, false).certificate; }

GroupState GroupState::initial(const SimplexState& state, std::uint64_t seed) {
  GroupState g;
  std::vector<ArcId> arcs;
  const auto num_arcs = state.instance().num_arcs();
  arcs.reserve(static_cast<std::size_t>(num_arcs));
  for (ArcId a = 0; a < num_arcs; ++a) {
    if (!state.is_basic(a)) arcs.push_back(a);
  }
  auto rng = make_rng(seed, Stream::kShuffle);
  std::shuffle(arcs.begin(), arcs.end(), rng);
  g.likely.assign(arcs.begin(), arcs.end());
  return g;
}

std::string GroupState::check_partition(const SimplexState& state) const {
  const auto num_arcs = state.instance().num_arcs();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(num_arcs), 0);
  auto mark = [&](const std::deque<ArcId>& group, const char* name) -> std::string {
    for (ArcId a : group) {
      if (a < 0 || a >= num_arcs) return std::string(name) + " holds an invalid arc";
      if (state.is_basic(a)) return std::string(name) + " holds basic arc " + std::to_string(a);
      if (seen[static_cast<std::size_t>(a)]++) return "arc " + std::to_string(a) + " appears twice";
    }
    return {};
  };
  if (auto e = mark(likely, "likely group"); !e.empty()) return e;
  if (auto e = mark(unlikely, "unlikely group"); !e.empty()) return e;
  for (ArcId a = 0; a < num_arcs; ++a) {
    if (!seen[static_cast<std::size_t>(a)] && !state.is_basic(a)) {
      return "nonbasic arc " + std::to_string(a) + " is in neither group";
    }
  }
  return {};
}

std::optional<std::vector<ArcId>> select_block(GroupState& groups, SimplexState& state,
                                               std::int64_t block_size,
                                               std::int64_t screen_likely,
                                               std::int64_t screen_unlikely,
                                               std::int64_t* rounds) {
  std::vector<std::pair<std::int64_t, ArcId>> screened;
  while (!groups.likely.empty()) {
    if (rounds) ++*rounds;
    screened.clear();
    const auto from_likely =
        std::min<std::int64_t>(static_cast<std::int64_t>(groups.likely.size()), screen_likely);
    const auto from_unlikely =
        std::min<std::int64_t>(static_cast<std::int64_t>(groups.unlikely.size()), screen_unlikely);
    bool any_negative = false;
    auto take = [&](std::deque<ArcId>& group, std::int64_t count) {
      for (std::int64_t k = 0; k < count; ++k) {
        const ArcId a = group.front();
        group.pop_front();
        const auto r = state.reduced_cost(a);
        any_negative = any_negative || r < 0;
        screened.emplace_back(r, a);
      }
    };
    take(groups.likely, from_likely);
    take(groups.unlikely, from_unlikely);
    if (!any_negative) {
      for (const auto& [r, a] : screened) groups.unlikely.push_back(a);
      continue;
    }
    const auto keep = std::min<std::int64_t>(block_size, static_cast<std::int64_t>(screened.size()));
    std::nth_element(screened.begin(), screened.begin() + (keep - 1), screened.end());
    std::sort(screened.begin(), screened.begin() + keep);
    std::vector<ArcId> block;
    block.reserve(static_cast<std::size_t>(keep));
    for (std::int64_t k = 0; k < keep; ++k) block.push_back(screened[static_cast<std::size_t>(k)].second);
    for (std::size_t k = static_cast<std::size_t>(keep); k < screened.size(); ++k) {
      groups.unlikely.push_back(screened[k].second);
    }
    return block;
  }
  return std::nullopt;
}

std::optional<std::vector<ArcId>> gs_select_block(GroupState& groups, SimplexState& state,
                                                  const BlockConfig& config) {
  const auto num_arcs = state.instance().num_arcs();
  return select_block(groups, state, config.block_count(num_arcs), config.screen_count(num_arcs),
                      config.explore_count(num_arcs));
}

BcdResult gs_bcdns(const Instance& inst, const BlockConfig& config) {
  return gs_bcdns(northwest_corner(inst), config);
}

BcdResult gs_bcdns(SimplexState initial, const BlockConfig& config) {
  config.validate(true);
  const auto start = Clock::now();
  BcdResult out{std::move(initial), {}};
  auto& state = out.state;
  auto& report = out.report;
  report.method = "gs-bcdns";
  report.threshold = config.threshold.name;
  report.initial_objective = state.objective();

  const auto num_arcs = state.instance().num_arcs();
  const auto block_size = config.block_count(num_arcs);
  const auto screen = config.screen_count(num_arcs);
  const auto explore = config.explore_count(num_arcs);
  auto rng = make_rng(config.seed, Stream::kBlockSelection);
  GroupState groups = GroupState::initial(state, config.seed);
  std::vector<std::uint8_t> promoted(static_cast<std::size_t>(num_arcs), 0);

  while (config.max_outer < 0 || static_cast<std::int64_t>(report.iterations.size()) < config.max_outer) {
    const auto evals_before = state.counters().evaluations;
    std::int64_t rounds = 0;
    auto block = select_block(groups, state, block_size, screen, explore, &rounds);
    if (!block) {
      // Optimality check once the likely group is exhausted.
      auto scan = full_scan(state, true);
      ++report.full_scans;
      if (scan.certificate.optimal()) {
        report.certificate = scan.certificate;
        report.complete = true;
        break;
      }
      std::shuffle(scan.negatives.begin(), scan.negatives.end(), rng);
      for (ArcId a : scan.negatives) promoted[static_cast<std::size_t>(a)] = 1;
      std::erase_if(groups.unlikely,
                    [&](ArcId a) { return promoted[static_cast<std::size_t>(a)] != 0; });
      for (ArcId a : scan.negatives) promoted[static_cast<std::size_t>(a)] = 0;
      groups.likely.assign(scan.negatives.begin(), scan.negatives.end());
      continue;
    }
    auto result = solve_block(state, *block, config, report, evals_before, rounds, start);
    const auto threshold = config.threshold.at(report.iterations.back().k);
    for (std::size_t idx = 0; idx < result.working_set.size(); ++idx) {
      const ArcId a = result.working_set[idx];
      if (state.is_basic(a)) continue;
      if (result.reduced_costs[idx] < threshold) {
        groups.likely.push_back(a);
      } else {
        groups.unlikely.push_back(a);
      }
    }
    if (config.check_invariants) {
      if (auto problem = groups.check_partition(state); !problem.empty()) {
        throw std::logic_error("group partition broken: " + problem);
      }
    }
  }
  if (!report.complete) report.certificate = certify_optimal(state);
  finish(report, state, start);
  return out;
}

BcdResult rs_bcdns(const Instance& inst, const BlockConfig& config) {
  return rs_bcdns(northwest_corner(inst), config);
}

BcdResult rs_bcdns(SimplexState initial, const BlockConfig& config) {
  config.validate(false);
  const auto start = Clock::now();
  BcdResult out{std::move(initial), {}};
  auto& state = out.state;
  auto& report = out.report;
  report.method = "rs-bcdns";
  report.threshold = "n/a";
  report.initial_objective = state.objective();

  const auto num_arcs = state.instance().num_arcs();
  auto rng = make_rng(config.seed, Stream::kBlockSelection);
  std::vector<ArcId> complement;

  while (true) {
    const auto evals_before = state.counters().evaluations;
    auto scan = full_scan(state, false);
    ++report.full_scans;
    if (scan.certificate.optimal()) {
      report.certificate = scan.certificate;
      report.complete = true;
      break;
    }
    if (config.max_outer >= 0 && static_cast<std::int64_t>(report.iterations.size()) >= config.max_outer) {
      report.certificate = scan.certificate;
      break;
    }
    complement.clear();
    for (ArcId a = 0; a < num_arcs; ++a) {
      if (!state.is_basic(a)) complement.push_back(a);
    }
    const auto size = static_cast<std::int64_t>(complement.size());
    const auto want = std::min(config.block_count(num_arcs), size);
    std::vector<ArcId> block;
    std::int64_t attempts = 0;
    while (true) {
      ++attempts;
      // Partial Fisher-Yates: the first `want` slots become a uniform sample.
      for (std::int64_t k = 0; k < want; ++k) {
        std::uniform_int_distribution<std::int64_t> pick(k, size - 1);
        std::swap(complement[static_cast<std::size_t>(k)],
                  complement[static_cast<std::size_t>(pick(rng))]);
      }
      block.assign(complement.begin(), complement.begin() + want);
      bool negative = false;
      for (ArcId a : block) negative = (state.reduced_cost(a) < 0) || negative;
      if (negative) break;
      if (attempts >= config.resample_cap) {
        block.push_back(scan.certificate.arc);
        break;
      }
    }
    solve_block(state, block, config, report, evals_before, attempts, start);
  }
  finish(report, state, start);
  return out;
}

}  // namespace otbcd
