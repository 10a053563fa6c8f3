#include "otbcd/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include "otbcd/error.hpp"
#include "otbcd/oracles.hpp"

namespace otbcd {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kNs:
      return "ns";
    case Method::kRsBcdns:
      return "rs-bcdns";
    case Method::kGsBcdns:
      return "gs-bcdns";
    case Method::kSinkhorn:
      return "sinkhorn";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "ns") return Method::kNs;
  if (name == "rs-bcdns") return Method::kRsBcdns;
  if (name == "gs-bcdns") return Method::kGsBcdns;
  if (name == "sinkhorn") return Method::kSinkhorn;
  fail(ErrorCode::kInvalidConfig, "unknown method '" + std::string(name) + "'");
}

bool is_exact(Method method) { return method != Method::kSinkhorn; }

ExactRun run_exact(Method method, const Instance& inst, const ExactSettings& settings,
                   std::uint64_t seed) {
  if (!is_exact(method)) fail(ErrorCode::kInvalidConfig, "run_exact needs an exact method");
  ExactRun run;
  run.method = method;
  if (method == Method::kNs) {
    const auto start = std::chrono::steady_clock::now();
    auto state = northwest_corner(inst);
    const auto report = solve_full(state, settings.ns);
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    run.objective = state.objective();
    run.evaluations = state.counters().evaluations;
    run.pivots = report.pivots;
    run.plan = state.plan();
    // The last pricing pass already proved optimality; replay it uncounted.
    const auto before = state.counters().evaluations;
    run.certificate = certify_optimal(state);
    state.counters().evaluations = before;
    return run;
  }
  BlockConfig config = settings.block;
  if (settings.derive_st) {
    const auto d = BlockConfig::defaults_for(inst.n());
    config.s = d.s;
    config.t = d.t;
  }
  config.seed = seed;
  if (method == Method::kRsBcdns && settings.rs_block_size > 0) {
    config.block_size = settings.rs_block_size;
  }
  const auto start = std::chrono::steady_clock::now();
  auto result = method == Method::kRsBcdns ? rs_bcdns(inst, config) : gs_bcdns(inst, config);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  run.objective = result.state.objective();
  run.evaluations = result.report.evaluations;
  run.pivots = result.report.pivots;
  run.outer_iterations = result.report.outer_iterations;
  run.certificate = result.report.certificate;
  run.plan = result.state.plan();
  run.outer = std::move(result.report);
  return run;
}

const GridCell* GridResult::find(double s, double t) const {
  for (const auto& c : cells) {
    if (std::abs(c.s - s) < 1e-12 && std::abs(c.t - t) < 1e-12) return &c;
  }
  return nullptr;
}

GridResult run_grid(const ProblemSpec& problem, std::int64_t n, std::uint64_t seed,
                    const std::vector<double>& s_values, const std::vector<double>& t_values,
                    std::int64_t scale, const BlockConfig& base,
                    const std::function<void(const GridCell&)>& on_cell) {
  GridResult grid;
  grid.problem = problem.name();
  grid.n = n;
  grid.seed = seed;
  grid.s_values = s_values;
  grid.t_values = t_values;
  const auto samples = generate_samples(problem, n, seed);
  const auto inst = Instance::from_samples(samples, scale);
  for (double s : s_values) {
    for (double t : t_values) {
      if (!(s < t)) continue;
      BlockConfig config = base;
      config.s = s;
      config.t = t;
      config.seed = seed;
      config.block_size = 0;
      const auto start = std::chrono::steady_clock::now();
      auto result = gs_bcdns(inst, config);
      GridCell cell;
      cell.s = s;
      cell.t = t;
      cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      cell.evaluations = result.report.evaluations;
      cell.pivots = result.report.pivots;
      cell.outer_iterations = result.report.outer_iterations;
      cell.objective = result.state.objective();
      cell.certified = result.report.complete && result.report.certificate.optimal();
      grid.cells.push_back(cell);
      if (on_cell) on_cell(cell);
    }
  }
  return grid;
}

std::vector<ComparisonRow> run_comparison(const ProblemSpec& problem,
                                          const std::vector<std::int64_t>& n_values,
                                          const std::vector<Method>& methods,
                                          const std::vector<std::uint64_t>& seeds,
                                          std::int64_t scale, const ExactSettings& settings,
                                          const std::function<void(const ComparisonRow&)>& on_row) {
  std::vector<ComparisonRow> rows;
  for (auto n : n_values) {
    for (auto seed : seeds) {
      const auto inst = Instance::from_samples(generate_samples(problem, n, seed), scale);
      std::vector<ComparisonRow> block;
      std::optional<double> ns_time;
      for (Method method : methods) {
        if (!is_exact(method)) {
          fail(ErrorCode::kInvalidConfig, "comparison runs exact methods only");
        }
        const auto run = run_exact(method, inst, settings, seed);
        if (!run.certificate.optimal()) {
          fail(ErrorCode::kExactnessViolation, std::string(to_string(method)) +
                                                   " stopped without an optimality certificate");
        }
        ComparisonRow row;
        row.n = n;
        row.seed = seed;
        row.method = method;
        row.runtime_s = run.seconds;
        row.evaluations = run.evaluations;
        row.pivots = run.pivots;
        row.objective = run.objective;
        row.objective_value = inst.descale(run.objective);
        if (method == Method::kNs) ns_time = run.seconds;
        block.push_back(row);
      }
      for (auto& row : block) {
        if (row.objective != block.front().objective) {
          fail(ErrorCode::kExactnessViolation,
               "n=" + std::to_string(n) + " seed=" + std::to_string(seed) + ": " +
                   std::string(to_string(row.method)) + " objective " +
                   std::to_string(row.objective) + " differs from " +
                   std::string(to_string(block.front().method)) + " objective " +
                   std::to_string(block.front().objective));
        }
        row.speedup_vs_ns = ns_time ? *ns_time / std::max(row.runtime_s, 1e-12)
                                    : std::numeric_limits<double>::quiet_NaN();
        if (row.method == Method::kNs) row.speedup_vs_ns = 1.0;
        if (on_row) on_row(row);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

GapStudy run_gap_vs_time(const ProblemSpec& problem, std::int64_t n, std::uint64_t seed,
                         const std::vector<double>& epsilons, std::int64_t scale,
                         const ExactSettings& settings, const SinkhornConfig& sinkhorn) {
  const auto inst = Instance::from_samples(generate_samples(problem, n, seed), scale);
  GapStudy study;
  {
    auto reference = northwest_corner(inst);
    solve_full(reference, settings.ns);
    study.optimum_scaled = reference.objective();
    study.optimum = true_cost(reference.plan(), inst);
  }

  GapTrace gs;
  gs.method = Method::kGsBcdns;
  const auto run = run_exact(Method::kGsBcdns, inst, settings, seed);
  gs.points.push_back({0.0, inst.descale(run.outer.initial_objective - study.optimum_scaled)});
  for (const auto& it : run.outer.iterations) {
    gs.points.push_back({it.seconds, inst.descale(it.objective - study.optimum_scaled)});
  }
  gs.final_gap_scaled = run.objective - study.optimum_scaled;
  gs.final_gap = inst.descale(gs.final_gap_scaled);
  gs.points.push_back({run.seconds, gs.final_gap});
  gs.converged = run.certificate.optimal();
  study.traces.push_back(std::move(gs));

  for (double eps : epsilons) {
    SinkhornConfig config = sinkhorn;
    config.epsilon = eps;
    config.gamma = 0.0;
    const auto result = sinkhorn_solve(inst, config);
    GapTrace trace;
    trace.method = Method::kSinkhorn;
    trace.epsilon = eps;
    trace.converged = result.converged;
    trace.truncated = result.truncated;
    for (const auto& pt : result.trace) {
      if (std::isnan(pt.objective_rounded)) continue;
      trace.points.push_back({pt.seconds, pt.objective_rounded - study.optimum});
      trace.max_residual = std::max(trace.max_residual, pt.residual);
      trace.all_feasible = trace.all_feasible && pt.residual <= 1e-12;
    }
    trace.final_gap = result.objective_rounded - study.optimum;
    study.traces.push_back(std::move(trace));
  }
  return study;
}

std::vector<double> barycentric_projection(const DensePlan& plan, const SamplePair& samples,
                                           std::span<const double> p) {
  const int dim = samples.dim;
  if (plan.n != samples.n() || plan.m != samples.m() ||
      static_cast<std::int64_t>(p.size()) != plan.n) {
    fail(ErrorCode::kInvalidInput, "plan, samples and marginals disagree in size");
  }
  std::vector<double> out(static_cast<std::size_t>(plan.n * dim), 0.0);
  for (std::int64_t i = 0; i < plan.n; ++i) {
    const double pi = p[static_cast<std::size_t>(i)];
    if (!(pi > 0.0)) fail(ErrorCode::kInvalidInput, "zero source mass at row " + std::to_string(i));
    for (std::int64_t j = 0; j < plan.m; ++j) {
      const double x = plan(i, j);
      if (x == 0.0) continue;
      const auto vj = samples.target(j);
      for (int d = 0; d < dim; ++d) out[static_cast<std::size_t>(i * dim + d)] += x * vj[d];
    }
    for (int d = 0; d < dim; ++d) out[static_cast<std::size_t>(i * dim + d)] /= pi;
  }
  return out;
}

std::vector<double> barycentric_projection(const TransportPlan& plan, const SamplePair& samples,
                                           const Instance& inst) {
  const int dim = samples.dim;
  if (plan.n != samples.n() || plan.m != samples.m() || plan.n != inst.n()) {
    fail(ErrorCode::kInvalidInput, "plan, samples and instance disagree in size");
  }
  std::vector<double> out(static_cast<std::size_t>(plan.n * dim), 0.0);
  for (const auto& e : plan.entries) {
    const auto vj = samples.target(e.j);
    for (int d = 0; d < dim; ++d) {
      out[static_cast<std::size_t>(e.i * dim + d)] += static_cast<double>(e.mass) * vj[d];
    }
  }
  for (std::int64_t i = 0; i < plan.n; ++i) {
    const auto pi = inst.supply(i);
    if (pi <= 0) fail(ErrorCode::kInvalidInput, "zero source mass at row " + std::to_string(i));
    for (int d = 0; d < dim; ++d) out[static_cast<std::size_t>(i * dim + d)] /= static_cast<double>(pi);
  }
  return out;
}

LargeScaleReport run_large_scale(const ProblemSpec& problem, std::int64_t n, std::uint64_t seed,
                                 const std::vector<std::int64_t>& checkpoints, std::int64_t scale,
                                 const BlockConfig& config) {
  if (problem.dim != 1) fail(ErrorCode::kInvalidConfig, "large-scale run is 1D only");
  LargeScaleReport report;
  report.n = n;
  report.seed = seed;
  report.samples = generate_samples(problem, n, seed);
  const auto inst = Instance::from_samples(report.samples, scale);
  BlockConfig cfg = config;
  cfg.seed = seed;
  auto user_hook = cfg.on_iteration;
  cfg.on_iteration = [&](const OuterIteration& it, const SimplexState& state) {
    const auto epoch = it.k + 1;
    if (std::find(checkpoints.begin(), checkpoints.end(), epoch) != checkpoints.end()) {
      report.snapshots.push_back(
          {epoch, state.objective(), barycentric_projection(state.plan(), report.samples, inst)});
    }
    if (user_hook) user_hook(it, state);
  };
  auto result = gs_bcdns(inst, cfg);
  report.snapshots.push_back({-1, result.state.objective(),
                              barycentric_projection(result.state.plan(), report.samples, inst)});
  report.outer = std::move(result.report);
  report.descaled = inst.descale(result.state.objective());
  report.oracle = oracle_1d_monotone(report.samples, inst);
  report.tolerance = static_cast<double>(n) * static_cast<double>(n) / static_cast<double>(scale);
  report.matches_oracle = std::abs(report.descaled - report.oracle) <= report.tolerance;
  return report;
}

}  // namespace otbcd
