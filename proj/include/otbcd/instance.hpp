#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace otbcd {

using ArcId = std::int64_t;
using NodeId = std::int64_t;

inline constexpr std::int64_t kDefaultScale = 1'000'000;

enum class Distribution {
  kUniform,  // Unif[-1,1]^d
  kNormal,   // N(0, I_d)
  kMixture,  // 1/2 N(-2*1, I_d) + 1/2 N(2*1, I_d)
  kBeta,     // Beta(0.5, 0.5) mapped affinely to [-1,1], per coordinate
};

std::string_view to_string(Distribution d);
Distribution parse_distribution(std::string_view name);

/// Source/target pair of distributions plus the ambient dimension.
struct ProblemSpec {
  Distribution source = Distribution::kUniform;
  Distribution target = Distribution::kNormal;
  int dim = 1;

  std::string name() const;
};

/// Accepts "uniform-normal", "normal-mixture", "uniform-beta" or any
/// "<source>-<target>" pair of distribution names.
ProblemSpec parse_problem(std::string_view name, int dim = 1);

/// Sampled point sets. Points are stored flattened, `dim` coordinates each.
struct SamplePair {
  int dim = 1;
  std::vector<double> u;
  std::vector<double> v;
  std::uint64_t seed = 0;
  Distribution kind_u = Distribution::kUniform;
  Distribution kind_v = Distribution::kNormal;

  std::int64_t n() const { return static_cast<std::int64_t>(u.size()) / dim; }
  std::int64_t m() const { return static_cast<std::int64_t>(v.size()) / dim; }
  std::span<const double> source(std::int64_t i) const;
  std::span<const double> target(std::int64_t j) const;
};

/// Draws `count` i.i.d. points of dimension `dim` from `kind`.
std::vector<double> draw_points(Distribution kind, int dim, std::int64_t count,
                                std::uint64_t seed, bool target_stream);

/// n source and n target samples for a problem; deterministic in (problem, n, seed).
SamplePair generate_samples(const ProblemSpec& problem, std::int64_t n,
                            std::uint64_t seed);

/// Balanced discrete OT problem on the complete bipartite graph.
///
/// Masses are integers in a common unit of 1/total_mass() so that balance and
/// feasibility are exact. Costs are kept both as given and as integers
/// round(scale * c_ij), which is what every exact solver pivots on.
/// Arc (i, j) has index i * m + j; node i is supply i, node n + j is demand j.
class Instance {
 public:
  static Instance from_samples(const SamplePair& samples,
                               std::int64_t scale = kDefaultScale);
  static Instance from_matrix(std::int64_t n, std::int64_t m,
                              std::vector<double> cost,
                              std::vector<std::int64_t> supply,
                              std::vector<std::int64_t> demand,
                              std::int64_t scale = kDefaultScale);

  std::int64_t n() const { return n_; }
  std::int64_t m() const { return m_; }
  std::int64_t num_arcs() const { return n_ * m_; }
  std::int64_t num_nodes() const { return n_ + m_; }

  ArcId arc(std::int64_t i, std::int64_t j) const { return i * m_ + j; }
  std::int64_t row(ArcId a) const { return a / m_; }
  std::int64_t col(ArcId a) const { return a % m_; }

  double cost(ArcId a) const { return cost_[a]; }
  double cost(std::int64_t i, std::int64_t j) const { return cost_[arc(i, j)]; }
  std::int64_t scaled_cost(ArcId a) const { return scaled_[a]; }
  std::int64_t scaled_cost(std::int64_t i, std::int64_t j) const {
    return scaled_[arc(i, j)];
  }
  std::span<const double> costs() const { return cost_; }
  std::span<const std::int64_t> scaled_costs() const { return scaled_; }

  std::int64_t supply(std::int64_t i) const { return supply_[i]; }
  std::int64_t demand(std::int64_t j) const { return demand_[j]; }
  std::span<const std::int64_t> supplies() const { return supply_; }
  std::span<const std::int64_t> demands() const { return demand_; }
  std::int64_t total_mass() const { return total_; }
  std::int64_t scale() const { return scale_; }

  std::vector<double> supply_fractions() const;
  std::vector<double> demand_fractions() const;

  /// Converts a scaled integer objective to the original cost units.
  double descale(std::int64_t scaled_objective) const;

 private:
  Instance() = default;
  void finish();

  std::int64_t n_ = 0;
  std::int64_t m_ = 0;
  std::int64_t scale_ = kDefaultScale;
  std::int64_t total_ = 0;
  std::vector<double> cost_;
  std::vector<std::int64_t> scaled_;
  std::vector<std::int64_t> supply_;
  std::vector<std::int64_t> demand_;
};

/// Converts fractional marginals to integer mass units with a common
/// power-of-ten denominator. Throws InvalidInstance when no denominator up to
/// 10^9 represents them.
std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> integer_masses(
    std::span<const double> p, std::span<const double> q);

struct PlanEntry {
  std::int64_t i = 0;
  std::int64_t j = 0;
  std::int64_t mass = 0;  // in units of 1/total_mass

  friend bool operator==(const PlanEntry&, const PlanEntry&) = default;
};

/// Sparse transport plan with exact integer masses.
struct TransportPlan {
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::vector<PlanEntry> entries;

  std::int64_t mass(std::int64_t i, std::int64_t j) const;
};

/// Dense real-valued plan, masses as fractions of the total (Sinkhorn side).
struct DensePlan {
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::vector<double> x;

  double operator()(std::int64_t i, std::int64_t j) const { return x[i * m + j]; }
  double& operator()(std::int64_t i, std::int64_t j) { return x[i * m + j]; }
};

DensePlan to_dense(const TransportPlan& plan, const Instance& inst);

struct Objective {
  std::int64_t scaled = 0;  // sum of scaled_cost * mass units
  double value = 0.0;       // scaled / (scale * total_mass)
};

Objective objective(const TransportPlan& plan, const Instance& inst);

/// Plan cost under the unscaled costs, masses as fractions of the total.
double true_cost(const TransportPlan& plan, const Instance& inst);
double true_cost(const DensePlan& plan, const Instance& inst);

struct FeasibilityVerdict {
  bool feasible = true;
  bool negative_entry = false;
  bool worst_is_row = true;
  std::int64_t worst_index = -1;
  std::int64_t max_violation = 0;  // exact, mass units
  double max_violation_fraction = 0.0;

  std::string describe() const;
};

FeasibilityVerdict check_feasibility(const TransportPlan& plan, const Instance& inst);

/// Dense check: residuals measured as fractions of the total mass.
FeasibilityVerdict check_feasibility(const DensePlan& plan, const Instance& inst,
                                     double tolerance = 1e-12);

}  // namespace otbcd
