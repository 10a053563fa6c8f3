#include "otbcd/network_simplex.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <queue>
#include <sstream>

#include "otbcd/error.hpp"

namespace otbcd {

std::string_view to_string(PricingRule rule) {
  switch (rule) {
    case PricingRule::kBland:
      return "bland";
    case PricingRule::kMostNegative:
      return "most-negative";
  }
  return "unknown";
}

PricingRule parse_pricing(std::string_view name) {
  if (name == "bland") return PricingRule::kBland;
  if (name == "most-negative") return PricingRule::kMostNegative;
  fail(ErrorCode::kInvalidConfig, "unknown pricing rule '" + std::string(name) + "'");
}

namespace {

constexpr NodeId kNone = -1;

struct Adjacency {
  std::vector<std::vector<std::pair<NodeId, ArcId>>> edges;
};

Adjacency tree_adjacency(std::span<const ArcId> arcs, const Instance& inst) {
  const auto nodes = inst.num_nodes();
  if (static_cast<std::int64_t>(arcs.size()) != nodes - 1) {
    fail(ErrorCode::kInvalidBasis, "basis has " + std::to_string(arcs.size()) +
                                       " arcs, a spanning tree needs " +
                                       std::to_string(nodes - 1));
  }
  Adjacency adj;
  adj.edges.resize(static_cast<std::size_t>(nodes));
  for (ArcId a : arcs) {
    if (a < 0 || a >= inst.num_arcs()) fail(ErrorCode::kInvalidBasis, "arc id out of range");
    const NodeId s = inst.row(a);
    const NodeId d = inst.n() + inst.col(a);
    adj.edges[static_cast<std::size_t>(s)].emplace_back(d, a);
    adj.edges[static_cast<std::size_t>(d)].emplace_back(s, a);
  }
  return adj;
}

}  // namespace

DualPotentials compute_potentials(std::span<const ArcId> basis, const Instance& inst) {
  const auto adj = tree_adjacency(basis, inst);
  const auto nodes = inst.num_nodes();
  DualPotentials out;
  out.pi.assign(static_cast<std::size_t>(nodes), 0);
  std::vector<bool> seen(static_cast<std::size_t>(nodes), false);
  std::vector<NodeId> queue{0};
  seen[0] = true;
  out.operations = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId v = queue[head];
    for (auto [w, a] : adj.edges[static_cast<std::size_t>(v)]) {
      if (seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = true;
      const auto c = inst.scaled_cost(a);
      // pi_supply - pi_demand = c on every basic arc.
      out.pi[static_cast<std::size_t>(w)] =
          w < inst.n() ? out.pi[static_cast<std::size_t>(v)] + c
                       : out.pi[static_cast<std::size_t>(v)] - c;
      ++out.operations;
      queue.push_back(w);
    }
  }
  if (static_cast<std::int64_t>(queue.size()) != nodes) {
    fail(ErrorCode::kInvalidBasis, "basis arcs do not connect all nodes");
  }
  return out;
}

SimplexState::SimplexState(const Instance& inst, std::span<const ArcId> arcs,
                           std::span<const std::int64_t> flows)
    : inst_(&inst), n_(inst.n()), m_(inst.m()) {
  if (arcs.size() != flows.size()) {
    fail(ErrorCode::kInvalidBasis, "arc and flow lists differ in length");
  }
  const auto nodes = inst.num_nodes();
  const auto adj = tree_adjacency(arcs, inst);
  const auto sz = static_cast<std::size_t>(nodes);
  parent_.assign(sz, kNone);
  pred_arc_.assign(sz, -1);
  flow_.assign(sz, 0);
  depth_.assign(sz, 0);
  first_child_.assign(sz, kNone);
  next_sibling_.assign(sz, kNone);
  prev_sibling_.assign(sz, kNone);
  pi_.assign(sz, 0);
  in_basis_.assign(static_cast<std::size_t>(inst.num_arcs()), 0);

  std::vector<std::int64_t> arc_flow;
  {
    // Flows keyed by arc for lookup while building the tree.
    std::vector<std::pair<ArcId, std::int64_t>> keyed;
    keyed.reserve(arcs.size());
    for (std::size_t k = 0; k < arcs.size(); ++k) keyed.emplace_back(arcs[k], flows[k]);
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t k = 1; k < keyed.size(); ++k) {
      if (keyed[k].first == keyed[k - 1].first) {
        fail(ErrorCode::kInvalidBasis, "duplicate basic arc " + std::to_string(keyed[k].first));
      }
    }
    for (const auto& [a, f] : keyed) {
      in_basis_[static_cast<std::size_t>(a)] = 1;
      objective_ += inst.scaled_cost(a) * f;
    }
    std::vector<bool> seen(sz, false);
    std::vector<NodeId> queue{0};
    seen[0] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId v = queue[head];
      for (auto [w, a] : adj.edges[static_cast<std::size_t>(v)]) {
        if (seen[static_cast<std::size_t>(w)]) continue;
        seen[static_cast<std::size_t>(w)] = true;
        pred_arc_[static_cast<std::size_t>(w)] = a;
        const auto it = std::lower_bound(keyed.begin(), keyed.end(), std::pair<ArcId, std::int64_t>{a, std::numeric_limits<std::int64_t>::min()});
        flow_[static_cast<std::size_t>(w)] = it->second;
        attach(w, v);
        queue.push_back(w);
      }
    }
    if (static_cast<std::int64_t>(queue.size()) != nodes) {
      fail(ErrorCode::kInvalidBasis, "basis arcs do not connect all nodes");
    }
  }
  depth_[0] = 0;
  pi_[0] = 0;
  for (NodeId c = first_child_[0]; c != kNone; c = next_sibling_[static_cast<std::size_t>(c)]) {
    refresh_subtree(c);
  }
  counters_.potential_updates += 1;
}

void SimplexState::detach(NodeId v) {
  const auto vs = static_cast<std::size_t>(v);
  const NodeId p = parent_[vs];
  if (p == kNone) return;
  const NodeId prev = prev_sibling_[vs];
  const NodeId next = next_sibling_[vs];
  if (prev != kNone) {
    next_sibling_[static_cast<std::size_t>(prev)] = next;
  } else {
    first_child_[static_cast<std::size_t>(p)] = next;
  }
  if (next != kNone) prev_sibling_[static_cast<std::size_t>(next)] = prev;
  parent_[vs] = kNone;
  prev_sibling_[vs] = next_sibling_[vs] = kNone;
}

void SimplexState::attach(NodeId v, NodeId new_parent) {
  const auto vs = static_cast<std::size_t>(v);
  parent_[vs] = new_parent;
  const NodeId head = first_child_[static_cast<std::size_t>(new_parent)];
  next_sibling_[vs] = head;
  prev_sibling_[vs] = kNone;
  if (head != kNone) prev_sibling_[static_cast<std::size_t>(head)] = v;
  first_child_[static_cast<std::size_t>(new_parent)] = v;
}

std::int64_t SimplexState::potential_from_parent(NodeId v) const {
  const auto vs = static_cast<std::size_t>(v);
  const auto c = inst_->scaled_cost(pred_arc_[vs]);
  const auto pp = pi_[static_cast<std::size_t>(parent_[vs])];
  return is_supply(v) ? pp + c : pp - c;
}

void SimplexState::refresh_subtree(NodeId top) {
  stack_.clear();
  stack_.push_back(top);
  while (!stack_.empty()) {
    const NodeId v = stack_.back();
    stack_.pop_back();
    const auto vs = static_cast<std::size_t>(v);
    depth_[vs] = depth_[static_cast<std::size_t>(parent_[vs])] + 1;
    pi_[vs] = potential_from_parent(v);
    ++counters_.potential_updates;
    for (NodeId c = first_child_[vs]; c != kNone; c = next_sibling_[static_cast<std::size_t>(c)]) {
      stack_.push_back(c);
    }
  }
}

std::vector<ArcId> SimplexState::basis() const {
  std::vector<ArcId> out;
  out.reserve(pred_arc_.size());
  for (std::size_t v = 1; v < pred_arc_.size(); ++v) out.push_back(pred_arc_[v]);
  std::sort(out.begin(), out.end());
  return out;
}

std::int64_t SimplexState::basis_size() const {
  return static_cast<std::int64_t>(pred_arc_.size()) - 1;
}

std::int64_t SimplexState::flow(ArcId a) const {
  if (!is_basic(a)) return 0;
  // The basic arc hangs below whichever endpoint is deeper.
  const NodeId s = inst_->row(a);
  const NodeId d = n_ + inst_->col(a);
  const NodeId child = parent_[static_cast<std::size_t>(s)] == d ? s : d;
  return flow_[static_cast<std::size_t>(child)];
}

TransportPlan SimplexState::plan(bool include_zero_basic) const {
  TransportPlan p{n_, m_, {}};
  for (std::size_t v = 1; v < pred_arc_.size(); ++v) {
    if (flow_[v] == 0 && !include_zero_basic) continue;
    const ArcId a = pred_arc_[v];
    p.entries.push_back({inst_->row(a), inst_->col(a), flow_[v]});
  }
  std::sort(p.entries.begin(), p.entries.end(), [](const PlanEntry& x, const PlanEntry& y) {
    return std::tie(x.i, x.j) < std::tie(y.i, y.j);
  });
  return p;
}

void SimplexState::price_all(std::span<std::int64_t> out) {
  const auto costs = inst_->scaled_costs();
  for (std::int64_t i = 0; i < n_; ++i) {
    const auto pi_i = pi_[static_cast<std::size_t>(i)];
    const auto row = static_cast<std::size_t>(i * m_);
    for (std::int64_t j = 0; j < m_; ++j) {
      out[row + static_cast<std::size_t>(j)] =
          costs[row + static_cast<std::size_t>(j)] - pi_i + pi_[static_cast<std::size_t>(n_ + j)];
    }
  }
  counters_.evaluations += n_ * m_;
}

PivotOutcome SimplexState::pivot(ArcId entering) {
  if (entering < 0 || entering >= inst_->num_arcs()) {
    fail(ErrorCode::kInvalidPivot, "entering arc out of range");
  }
  if (is_basic(entering)) {
    fail(ErrorCode::kInvalidPivot, "arc " + std::to_string(entering) + " is already basic");
  }
  PivotOutcome out;
  out.entering = entering;
  out.objective_before = objective_;

  const NodeId a = inst_->row(entering);
  const NodeId b = n_ + inst_->col(entering);
  const std::int64_t r = raw_reduced_cost(entering);

  // Pushing flow a -> b on the entering arc returns b -> join -> a through the
  // tree. Going up from b the arc is traversed child -> parent, going up from
  // a it is traversed parent -> child; every arc points supply -> demand.
  std::int64_t delta = std::numeric_limits<std::int64_t>::max();
  NodeId leave_node = kNone;
  ArcId leave_arc = std::numeric_limits<ArcId>::max();
  bool leave_on_a_side = false;
  auto consider = [&](NodeId v, bool a_side) {
    const auto vs = static_cast<std::size_t>(v);
    const auto f = flow_[vs];
    const auto arc = pred_arc_[vs];
    if (f < delta || (f == delta && arc < leave_arc)) {
      delta = f;
      leave_arc = arc;
      leave_node = v;
      leave_on_a_side = a_side;
    }
  };
  NodeId u = a;
  NodeId v = b;
  while (u != v) {
    if (depth_[static_cast<std::size_t>(u)] >= depth_[static_cast<std::size_t>(v)]) {
      if (is_supply(u)) consider(u, true);
      u = parent_[static_cast<std::size_t>(u)];
    } else {
      if (!is_supply(v)) consider(v, false);
      v = parent_[static_cast<std::size_t>(v)];
    }
  }
  const NodeId join = u;

  if (delta > 0) {
    for (NodeId x = a; x != join; x = parent_[static_cast<std::size_t>(x)]) {
      flow_[static_cast<std::size_t>(x)] += is_supply(x) ? -delta : delta;
    }
    for (NodeId x = b; x != join; x = parent_[static_cast<std::size_t>(x)]) {
      flow_[static_cast<std::size_t>(x)] += is_supply(x) ? delta : -delta;
    }
  }
  objective_ += delta * r;

  // Cut the leaving arc and re-hang the detached subtree from the entering
  // arc, reversing parent pointers along the path entry-endpoint -> leave_node.
  const NodeId start = leave_on_a_side ? a : b;
  const NodeId anchor = leave_on_a_side ? b : a;
  std::vector<NodeId> path;
  for (NodeId x = start;; x = parent_[static_cast<std::size_t>(x)]) {
    path.push_back(x);
    if (x == leave_node) break;
  }
  std::vector<ArcId> old_arc(path.size());
  std::vector<std::int64_t> old_flow(path.size());
  for (std::size_t t = 0; t < path.size(); ++t) {
    old_arc[t] = pred_arc_[static_cast<std::size_t>(path[t])];
    old_flow[t] = flow_[static_cast<std::size_t>(path[t])];
  }
  for (NodeId x : path) detach(x);
  for (std::size_t t = 0; t < path.size(); ++t) {
    const auto xs = static_cast<std::size_t>(path[t]);
    if (t == 0) {
      pred_arc_[xs] = entering;
      flow_[xs] = delta;
      attach(path[t], anchor);
    } else {
      pred_arc_[xs] = old_arc[t - 1];
      flow_[xs] = old_flow[t - 1];
      attach(path[t], path[t - 1]);
    }
  }
  in_basis_[static_cast<std::size_t>(entering)] = 1;
  in_basis_[static_cast<std::size_t>(leave_arc)] = 0;
  refresh_subtree(start);

  ++counters_.pivots;
  if (delta == 0) ++counters_.degenerate_pivots;
  out.leaving = leave_arc;
  out.delta = delta;
  out.objective_after = objective_;
  return out;
}

std::string SimplexState::validate() const {
  std::ostringstream err;
  const auto nodes = static_cast<std::size_t>(n_ + m_);
  std::int64_t basic = 0;
  for (auto b : in_basis_) basic += b;
  if (basic != static_cast<std::int64_t>(nodes) - 1) {
    err << "basis holds " << basic << " arcs, expected " << nodes - 1;
    return err.str();
  }
  if (parent_[0] != kNone) return "root has a parent";
  std::vector<std::int64_t> balance(nodes, 0);
  std::int64_t obj = 0;
  std::vector<int> children(nodes, 0);
  for (std::size_t v = 1; v < nodes; ++v) {
    const NodeId p = parent_[v];
    const ArcId arc = pred_arc_[v];
    if (p == kNone) {
      err << "node " << v << " is detached";
      return err.str();
    }
    const NodeId s = inst_->row(arc);
    const NodeId d = n_ + inst_->col(arc);
    const auto vn = static_cast<NodeId>(v);
    if (!((s == vn && d == p) || (d == vn && s == p))) {
      err << "pred arc of node " << v << " does not join it to its parent";
      return err.str();
    }
    if (!in_basis_[static_cast<std::size_t>(arc)]) {
      err << "tree arc " << arc << " not flagged basic";
      return err.str();
    }
    if (depth_[v] != depth_[static_cast<std::size_t>(p)] + 1) {
      err << "depth of node " << v << " inconsistent";
      return err.str();
    }
    if (raw_reduced_cost(arc) != 0) {
      err << "basic arc " << arc << " has nonzero reduced cost";
      return err.str();
    }
    if (flow_[v] < 0) {
      err << "negative flow on arc " << arc;
      return err.str();
    }
    balance[static_cast<std::size_t>(s)] += flow_[v];
    balance[static_cast<std::size_t>(d)] += flow_[v];
    obj += inst_->scaled_cost(arc) * flow_[v];
    ++children[static_cast<std::size_t>(p)];
  }
  for (std::size_t v = 0; v < nodes; ++v) {
    int listed = 0;
    for (NodeId c = first_child_[v]; c != kNone; c = next_sibling_[static_cast<std::size_t>(c)]) {
      if (parent_[static_cast<std::size_t>(c)] != static_cast<NodeId>(v)) return "child list corrupt";
      ++listed;
    }
    if (listed != children[v]) return "child list incomplete";
  }
  if (pi_[0] != 0) return "root potential is not zero";
  for (std::int64_t i = 0; i < n_; ++i) {
    if (balance[static_cast<std::size_t>(i)] != inst_->supply(i)) {
      err << "row " << i << " ships " << balance[static_cast<std::size_t>(i)] << " not "
          << inst_->supply(i);
      return err.str();
    }
  }
  for (std::int64_t j = 0; j < m_; ++j) {
    if (balance[static_cast<std::size_t>(n_ + j)] != inst_->demand(j)) {
      err << "column " << j << " receives " << balance[static_cast<std::size_t>(n_ + j)]
          << " not " << inst_->demand(j);
      return err.str();
    }
  }
  if (obj != objective_) return "cached objective out of date";
  return {};
}

bool SimplexState::feasible() const {
  return check_feasibility(plan(true), *inst_).feasible;
}

SimplexState northwest_corner(const Instance& inst) {
  const auto n = inst.n();
  const auto m = inst.m();
  std::vector<ArcId> arcs;
  std::vector<std::int64_t> flows;
  arcs.reserve(static_cast<std::size_t>(n + m - 1));
  flows.reserve(static_cast<std::size_t>(n + m - 1));
  std::int64_t i = 0;
  std::int64_t j = 0;
  std::int64_t rem_s = inst.supply(0);
  std::int64_t rem_d = inst.demand(0);
  while (true) {
    const auto f = std::min(rem_s, rem_d);
    arcs.push_back(inst.arc(i, j));
    flows.push_back(f);
    rem_s -= f;
    rem_d -= f;
    if (i == n - 1 && j == m - 1) break;
    const bool row_done = rem_s == 0 && i + 1 < n;
    const bool col_done = rem_d == 0 && j + 1 < m;
    if (row_done && col_done) {
      ++j;
      arcs.push_back(inst.arc(i, j));
      flows.push_back(0);
      ++i;
      rem_s = inst.supply(i);
      rem_d = inst.demand(j);
    } else if (row_done || j + 1 == m) {
      ++i;
      rem_s = inst.supply(i);
    } else {
      ++j;
      rem_d = inst.demand(j);
    }
  }
  return SimplexState(inst, arcs, flows);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Pricing sweep over every arc; returns the entering arc or -1.
ArcId scan_full(SimplexState& state, bool bland) {
  const auto& inst = state.instance();
  const auto n = inst.n();
  const auto m = inst.m();
  const auto costs = inst.scaled_costs();
  const auto pi = state.potentials();
  std::int64_t best = 0;
  ArcId entering = -1;
  std::int64_t scanned = 0;
  for (std::int64_t i = 0; i < n && !(bland && entering >= 0); ++i) {
    const auto pi_i = pi[static_cast<std::size_t>(i)];
    const auto row = i * m;
    if (bland) {
      for (std::int64_t j = 0; j < m; ++j) {
        ++scanned;
        if (costs[static_cast<std::size_t>(row + j)] - pi_i + pi[static_cast<std::size_t>(n + j)] < 0) {
          entering = row + j;
          break;
        }
      }
      continue;
    }
    for (std::int64_t j = 0; j < m; ++j) {
      const auto r = costs[static_cast<std::size_t>(row + j)] - pi_i +
                     pi[static_cast<std::size_t>(n + j)];
      if (r < best) {
        best = r;
        entering = row + j;
      }
    }
    scanned += m;
  }
  state.counters().evaluations += scanned;
  return entering;
}

// Pricing sweep over a sorted working set, recording every reduced cost.
ArcId scan_set(SimplexState& state, std::span<const ArcId> arcs, std::span<std::int64_t> out,
               bool bland) {
  std::int64_t best = 0;
  ArcId entering = -1;
  for (std::size_t k = 0; k < arcs.size(); ++k) {
    const auto r = state.reduced_cost(arcs[k]);
    out[k] = r;
    if (r < best) {
      best = r;
      entering = arcs[k];
      if (bland) break;
    }
  }
  return entering;
}

template <typename Scan>
SolveReport run_simplex(SimplexState& state, const SimplexOptions& options, Scan&& scan) {
  const auto start = Clock::now();
  const Counters before = state.counters();
  SolveReport report;
  report.pricing = options.pricing;
  std::int64_t streak = 0;
  if (options.trace_every > 0) report.trace.push_back({0, 0, state.objective(), 0.0});
  while (true) {
    if (options.max_pivots >= 0 && report.pivots >= options.max_pivots) break;
    const bool bland = options.pricing == PricingRule::kBland ||
                       streak >= options.degenerate_streak_limit;
    const ArcId entering = scan(bland);
    if (entering < 0) {
      report.optimal = true;
      break;
    }
    const auto outcome = state.pivot(entering);
    ++report.pivots;
    if (bland) ++report.bland_pivots;
    if (outcome.delta == 0) {
      ++streak;
    } else {
      streak = 0;
    }
    if (options.on_pivot) options.on_pivot(outcome);
    if (options.check_invariants) {
      if (auto problem = state.validate(); !problem.empty()) {
        throw std::logic_error("simplex invariant broken after pivot: " + problem);
      }
      if (outcome.objective_after > outcome.objective_before) {
        throw std::logic_error("pivot increased the objective");
      }
    }
    if (options.trace_every > 0 && report.pivots % options.trace_every == 0) {
      report.trace.push_back({report.pivots, outcome.delta, state.objective(), seconds_since(start)});
    }
  }
  report.seconds = seconds_since(start);
  report.degenerate_pivots = state.counters().degenerate_pivots - before.degenerate_pivots;
  report.evaluations = state.counters().evaluations - before.evaluations;
  report.objective = state.objective();
  if (options.trace_every > 0 &&
      (report.trace.empty() || report.trace.back().pivot != report.pivots)) {
    report.trace.push_back({report.pivots, 0, state.objective(), report.seconds});
  }
  return report;
}

}  // namespace

SolveReport solve_full(SimplexState& state, const SimplexOptions& options) {
  return run_simplex(state, options, [&](bool bland) { return scan_full(state, bland); });
}

RestrictedResult solve_restricted(SimplexState& state, std::vector<ArcId> working_set,
                                  const SimplexOptions& options) {
  RestrictedResult result;
  std::sort(working_set.begin(), working_set.end());
  working_set.erase(std::unique(working_set.begin(), working_set.end()), working_set.end());
  const auto num_arcs = state.instance().num_arcs();
  if (!working_set.empty() && (working_set.front() < 0 || working_set.back() >= num_arcs)) {
    fail(ErrorCode::kInvalidInput, "working set holds an arc id out of range");
  }
  for (NodeId v = 1; v < state.instance().num_nodes(); ++v) {
    const ArcId a = state.parent_arc(v);
    if (!std::binary_search(working_set.begin(), working_set.end(), a)) {
      fail(ErrorCode::kSuccessionViolation,
           "basic arc " + std::to_string(a) + " is missing from the working set");
    }
  }
  result.working_set = std::move(working_set);
  result.reduced_costs.assign(result.working_set.size(), 0);
  result.report = run_simplex(state, options, [&](bool bland) {
    return scan_set(state, result.working_set, result.reduced_costs, bland);
  });
  return result;
}

}  // namespace otbcd
