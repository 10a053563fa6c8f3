#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "otbcd/instance.hpp"
#include "otbcd/network_simplex.hpp"

namespace otbcd {

/// Threshold sequence {e_k} (scaled cost units) used to regrade working-set
/// arcs after each subproblem. Arcs with r < e_k go back to the likely group.
struct ThresholdSchedule {
  std::string name = "constant:0";
  std::function<std::int64_t(std::int64_t k)> value;

  std::int64_t at(std::int64_t k) const { return value ? value(k) : 0; }
  static ThresholdSchedule constant(std::int64_t e);
};

struct OuterIteration {
  std::int64_t k = 0;
  std::int64_t working_set = 0;     // |H_k|
  std::int64_t block = 0;           // |I_k|
  std::int64_t block_min_reduced_cost = 0;
  std::int64_t pivots = 0;          // l_k
  std::int64_t evaluations = 0;     // during iteration k, screening included
  std::int64_t screening_rounds = 0;
  std::int64_t objective = 0;       // q(x^k; H_k), scaled
  double seconds = 0.0;             // elapsed since the run started
};

class SimplexState;

struct BlockConfig {
  double s = 0.0;  // working-set fraction
  double t = 0.0;  // screening fraction (grouped selection only)
  double exploration = 0.1;  // unlikely-group slice, as a fraction of tN
  ThresholdSchedule threshold;
  int resample_cap = 32;
  std::int64_t block_size = 0;  // > 0 overrides ceil(sN)
  std::uint64_t seed = 0;
  SimplexOptions subproblem;
  std::int64_t max_outer = -1;  // < 0: uncapped
  bool check_invariants = false;
  std::function<void(const OuterIteration&, const SimplexState&)> on_iteration;

  /// s = 2/n and t = 20/n, clamped so that 0 < s < t <= 1 for small n.
  static BlockConfig defaults_for(std::int64_t n);

  void validate(bool grouped) const;
  std::int64_t block_count(std::int64_t num_arcs) const;
  std::int64_t screen_count(std::int64_t num_arcs) const;
  std::int64_t explore_count(std::int64_t num_arcs) const;
};

struct Certificate {
  std::int64_t min_reduced_cost = 0;
  ArcId arc = -1;  // first arc attaining the minimum; -1 if N == 0
  bool optimal() const { return min_reduced_cost >= 0; }
};

struct OuterReport {
  std::string method;
  std::string threshold;
  std::int64_t outer_iterations = 0;
  std::int64_t pivots = 0;
  std::int64_t evaluations = 0;
  std::int64_t full_scans = 0;
  std::int64_t initial_objective = 0;
  std::int64_t objective = 0;
  double seconds = 0.0;
  bool complete = false;  // terminated through the optimality test
  Certificate certificate;
  std::vector<OuterIteration> iterations;

  /// Number of k where objective(k) > objective(k-1), counting the initial
  /// point as k = -1.
  std::int64_t monotonicity_violations() const;
};

struct BcdResult {
  SimplexState state;
  OuterReport report;
};

/// {l in candidates : r_l < 0}; charges |candidates| evaluations.
std::vector<ArcId> negative_set(SimplexState& state, std::span<const ArcId> candidates);

/// One full pricing pass.
Certificate certify_optimal(SimplexState& state);

/// Arc partition of the grouped selection: `likely` (R) holds arcs expected to
/// enter an optimal basis, `unlikely` (S) the rest. Together with the basis
/// they cover every arc exactly once.
struct GroupState {
  std::deque<ArcId> likely;
  std::deque<ArcId> unlikely;

  /// likely = every nonbasic arc in random order, unlikely = empty.
  static GroupState initial(const SimplexState& state, std::uint64_t seed);

  /// Empty string when the partition invariant holds.
  std::string check_partition(const SimplexState& state) const;
};

/// Screens the first `screen_likely` arcs of `likely` and `screen_unlikely`
/// arcs from the head of `unlikely`; returns the `block_size` screened arcs of
/// smallest reduced cost once some screened arc is negative. Non-selected
/// screened arcs move to the tail of `unlikely`. std::nullopt means `likely`
/// ran empty before a negative arc was seen, i.e. a full scan is needed.
std::optional<std::vector<ArcId>> select_block(GroupState& groups, SimplexState& state,
                                               std::int64_t block_size,
                                               std::int64_t screen_likely,
                                               std::int64_t screen_unlikely,
                                               std::int64_t* rounds = nullptr);

/// Grouped-selection block step with sizes derived from `config`.
std::optional<std::vector<ArcId>> gs_select_block(GroupState& groups, SimplexState& state,
                                                  const BlockConfig& config);

/// Random-selection block coordinate network simplex.
BcdResult rs_bcdns(const Instance& inst, const BlockConfig& config);
BcdResult rs_bcdns(SimplexState initial, const BlockConfig& config);

/// Grouped-selection block coordinate network simplex.
BcdResult gs_bcdns(const Instance& inst, const BlockConfig& config);
BcdResult gs_bcdns(SimplexState initial, const BlockConfig& config);

}  // namespace otbcd
