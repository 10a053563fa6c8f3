#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "otbcd/instance.hpp"

namespace otbcd {

enum class PricingRule {
  kBland,          // lowest-index arc with negative reduced cost
  kMostNegative,   // Dantzig, with a Bland fallback on long degenerate streaks
};

std::string_view to_string(PricingRule rule);
PricingRule parse_pricing(std::string_view name);

struct DualPotentials {
  std::vector<std::int64_t> pi;  // node order: supplies, then demands; pi[0] == 0
  std::int64_t operations = 0;   // node potentials assigned during the traversal
};

/// Solves pi_i - pi_{n+j} = scaled c_ij on the given spanning tree with
/// pi_0 = 0. Throws InvalidBasis unless `basis` is a spanning tree.
DualPotentials compute_potentials(std::span<const ArcId> basis, const Instance& inst);

struct Counters {
  std::int64_t pivots = 0;
  std::int64_t degenerate_pivots = 0;
  std::int64_t evaluations = 0;        // reduced costs computed
  std::int64_t potential_updates = 0;  // node potentials rewritten
};

struct PivotOutcome {
  ArcId entering = -1;
  ArcId leaving = -1;
  std::int64_t delta = 0;
  std::int64_t objective_before = 0;
  std::int64_t objective_after = 0;
};

/// Basic feasible solution on a spanning tree of the n + m node bipartite
/// graph, rooted at supply node 0. Holds a non-owning pointer to the instance,
/// which must outlive the state.
class SimplexState {
 public:
  /// Builds a state from M - 1 basic arcs and their flows (mass units).
  /// Throws InvalidBasis for a non-tree arc set; flows are not checked here,
  /// see `feasible()`.
  SimplexState(const Instance& inst, std::span<const ArcId> arcs,
               std::span<const std::int64_t> flows);

  const Instance& instance() const { return *inst_; }

  bool is_basic(ArcId a) const { return in_basis_[static_cast<std::size_t>(a)] != 0; }
  std::vector<ArcId> basis() const;  // sorted arc ids
  std::int64_t basis_size() const;
  std::int64_t flow(ArcId a) const;  // zero for nonbasic arcs

  std::span<const std::int64_t> potentials() const { return pi_; }
  std::int64_t objective() const { return objective_; }
  TransportPlan plan(bool include_zero_basic = false) const;

  /// r_ij = scaled c_ij - (pi_i - pi_{n+j}); increments the evaluation counter.
  std::int64_t reduced_cost(ArcId a) {
    ++counters_.evaluations;
    return raw_reduced_cost(a);
  }

  /// Reduced costs for arcs [0, N) in order, written into `out`, counted.
  void price_all(std::span<std::int64_t> out);

  /// Exchanges `entering` with the Delta-attaining cycle arc of smallest
  /// index. Throws InvalidPivot if `entering` is already basic.
  PivotOutcome pivot(ArcId entering);

  Counters& counters() { return counters_; }
  const Counters& counters() const { return counters_; }

  NodeId parent(NodeId v) const { return parent_[static_cast<std::size_t>(v)]; }
  ArcId parent_arc(NodeId v) const { return pred_arc_[static_cast<std::size_t>(v)]; }
  std::int64_t depth(NodeId v) const { return depth_[static_cast<std::size_t>(v)]; }

  /// Structural self-check: spanning tree, potentials consistent with the
  /// basis, objective cache matches the flows. Returns an empty string when
  /// sound, otherwise the first problem found. O(M log M).
  std::string validate() const;
  bool feasible() const;

 private:
  std::int64_t raw_reduced_cost(ArcId a) const {
    const auto i = a / m_;
    const auto j = a - i * m_;
    return inst_->scaled_cost(a) - (pi_[static_cast<std::size_t>(i)] -
                                    pi_[static_cast<std::size_t>(n_ + j)]);
  }
  bool is_supply(NodeId v) const { return v < n_; }
  void detach(NodeId v);
  void attach(NodeId v, NodeId new_parent);
  void refresh_subtree(NodeId top);
  std::int64_t potential_from_parent(NodeId v) const;

  const Instance* inst_;
  std::int64_t n_;
  std::int64_t m_;
  std::vector<NodeId> parent_;
  std::vector<ArcId> pred_arc_;
  std::vector<std::int64_t> flow_;  // on pred_arc_
  std::vector<std::int64_t> depth_;
  std::vector<NodeId> first_child_;
  std::vector<NodeId> next_sibling_;
  std::vector<NodeId> prev_sibling_;
  std::vector<std::int64_t> pi_;
  std::vector<std::uint8_t> in_basis_;
  std::vector<NodeId> stack_;
  std::int64_t objective_ = 0;
  Counters counters_;
};

/// Northwest corner start. On simultaneous exhaustion of a row and a column
/// the column pointer advances first and a zero-flow arc (i, j+1) is added
/// before the row pointer advances, so the basis always has M - 1 arcs.
SimplexState northwest_corner(const Instance& inst);

struct TracePoint {
  std::int64_t pivot = 0;
  std::int64_t delta = 0;
  std::int64_t objective = 0;
  double seconds = 0.0;
};

struct SimplexOptions {
  PricingRule pricing = PricingRule::kMostNegative;
  std::int64_t degenerate_streak_limit = 50;  // switch to Bland after this many
  std::int64_t max_pivots = -1;               // < 0: uncapped
  std::int64_t trace_every = 0;               // 0: no timed trace
  std::function<void(const PivotOutcome&)> on_pivot;
  bool check_invariants = false;  // validate() after each pivot (tests)
};

struct SolveReport {
  PricingRule pricing = PricingRule::kMostNegative;
  std::int64_t pivots = 0;
  std::int64_t degenerate_pivots = 0;
  std::int64_t bland_pivots = 0;
  std::int64_t evaluations = 0;
  std::int64_t objective = 0;
  double seconds = 0.0;
  bool optimal = false;  // false only if max_pivots stopped the run
  std::vector<TracePoint> trace;
};

/// Pivots over all N arcs until every reduced cost is nonnegative.
SolveReport solve_full(SimplexState& state, const SimplexOptions& options = {});

struct RestrictedResult {
  SolveReport report;
  std::vector<ArcId> working_set;            // sorted, deduplicated H
  std::vector<std::int64_t> reduced_costs;   // final r for each arc of H
};

/// Optimizes over the arcs of `working_set` only, warm-started from `state`.
/// Throws SuccessionViolation if a basic arc of `state` is not in the set.
RestrictedResult solve_restricted(SimplexState& state, std::vector<ArcId> working_set,
                                  const SimplexOptions& options = {});

}  // namespace otbcd
