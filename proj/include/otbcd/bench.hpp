#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "otbcd/bcdns.hpp"
#include "otbcd/instance.hpp"
#include "otbcd/network_simplex.hpp"
#include "otbcd/sinkhorn.hpp"

namespace otbcd {

enum class Method { kNs, kRsBcdns, kGsBcdns, kSinkhorn };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);
bool is_exact(Method method);

/// Settings shared by the exact methods in a benchmark.
struct ExactSettings {
  SimplexOptions ns;           // full network simplex
  BlockConfig block;           // s/t ignored when `derive_st` is set
  bool derive_st = true;       // use BlockConfig::defaults_for(n) for s and t
  std::int64_t rs_block_size = 0;  // > 0 overrides ceil(sN) for RS only
};

struct ExactRun {
  Method method = Method::kNs;
  std::int64_t objective = 0;
  double seconds = 0.0;
  std::int64_t evaluations = 0;
  std::int64_t pivots = 0;
  std::int64_t outer_iterations = 0;
  Certificate certificate;
  TransportPlan plan;
  OuterReport outer;  // empty for NS
};

/// Runs one exact method from the northwest corner start.
ExactRun run_exact(Method method, const Instance& inst, const ExactSettings& settings,
                   std::uint64_t seed);

struct GridCell {
  double s = 0.0;
  double t = 0.0;
  std::int64_t evaluations = 0;
  std::int64_t pivots = 0;
  std::int64_t outer_iterations = 0;
  double seconds = 0.0;
  std::int64_t objective = 0;
  bool certified = false;
};

struct GridResult {
  std::string problem;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  std::vector<double> s_values;
  std::vector<double> t_values;
  std::vector<GridCell> cells;  // only s < t

  const GridCell* find(double s, double t) const;
};

GridResult run_grid(const ProblemSpec& problem, std::int64_t n, std::uint64_t seed,
                    const std::vector<double>& s_values, const std::vector<double>& t_values,
                    std::int64_t scale, const BlockConfig& base,
                    const std::function<void(const GridCell&)>& on_cell = {});

struct ComparisonRow {
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  Method method = Method::kNs;
  double runtime_s = 0.0;
  std::int64_t evaluations = 0;
  std::int64_t pivots = 0;
  std::int64_t objective = 0;
  double objective_value = 0.0;
  double speedup_vs_ns = 0.0;  // NaN when NS did not run
};

/// Every exact method on identical instances; throws ExactnessViolation when
/// their scaled objectives disagree.
std::vector<ComparisonRow> run_comparison(const ProblemSpec& problem,
                                          const std::vector<std::int64_t>& n_values,
                                          const std::vector<Method>& methods,
                                          const std::vector<std::uint64_t>& seeds,
                                          std::int64_t scale, const ExactSettings& settings,
                                          const std::function<void(const ComparisonRow&)>& on_row = {});

struct GapPoint {
  double seconds = 0.0;
  double gap = 0.0;
};

struct GapTrace {
  Method method = Method::kGsBcdns;
  double epsilon = 0.0;  // Sinkhorn only
  std::vector<GapPoint> points;
  double final_gap = 0.0;
  std::int64_t final_gap_scaled = -1;  // exact methods only
  bool converged = false;
  bool truncated = false;
  bool all_feasible = true;
  double max_residual = 0.0;
};

struct GapStudy {
  std::int64_t optimum_scaled = 0;
  double optimum = 0.0;  // unscaled cost of the exact optimal plan
  std::vector<GapTrace> traces;
};

GapStudy run_gap_vs_time(const ProblemSpec& problem, std::int64_t n, std::uint64_t seed,
                         const std::vector<double>& epsilons, std::int64_t scale,
                         const ExactSettings& settings, const SinkhornConfig& sinkhorn);

/// T(u_i) = (1/p_i) sum_j v_j x_ij, flattened n x dim. Throws InvalidInput on
/// a zero p_i.
std::vector<double> barycentric_projection(const DensePlan& plan, const SamplePair& samples,
                                           std::span<const double> p);
std::vector<double> barycentric_projection(const TransportPlan& plan, const SamplePair& samples,
                                           const Instance& inst);

struct ProjectionSnapshot {
  std::int64_t epoch = 0;  // outer iterations completed; -1 for the final plan
  std::int64_t objective = 0;
  std::vector<double> projection;
};

struct LargeScaleReport {
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  OuterReport outer;
  std::vector<ProjectionSnapshot> snapshots;
  double descaled = 0.0;
  double oracle = 0.0;
  double tolerance = 0.0;  // n^2 / S
  bool matches_oracle = false;
  SamplePair samples;
};

LargeScaleReport run_large_scale(const ProblemSpec& problem, std::int64_t n, std::uint64_t seed,
                                 const std::vector<std::int64_t>& checkpoints, std::int64_t scale,
                                 const BlockConfig& config);

}  // namespace otbcd
