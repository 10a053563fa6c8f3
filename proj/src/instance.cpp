#include "otbcd/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "otbcd/error.hpp"
#include "otbcd/rng.hpp"

namespace otbcd {

std::string_view to_string(Distribution d) {
  switch (d) {
    case Distribution::kUniform:
      return "uniform";
    case Distribution::kNormal:
      return "normal";
    case Distribution::kMixture:
      return "mixture";
    case Distribution::kBeta:
      return "beta";
  }
  return "unknown";
}

Distribution parse_distribution(std::string_view name) {
  if (name == "uniform") return Distribution::kUniform;
  if (name == "normal") return Distribution::kNormal;
  if (name == "mixture") return Distribution::kMixture;
  if (name == "beta") return Distribution::kBeta;
  fail(ErrorCode::kInvalidConfig, "unknown distribution '" + std::string(name) + "'");
}

std::string ProblemSpec::name() const {
  return std::string(to_string(source)) + "-" + std::string(to_string(target));
}

ProblemSpec parse_problem(std::string_view name, int dim) {
  if (dim != 1 && dim != 2) {
    fail(ErrorCode::kInvalidConfig, "dimension must be 1 or 2, got " + std::to_string(dim));
  }
  const auto dash = name.find('-');
  if (dash == std::string_view::npos) {
    fail(ErrorCode::kInvalidConfig, "problem must look like <source>-<target>: '" +
                                        std::string(name) + "'");
  }
  ProblemSpec spec;
  spec.source = parse_distribution(name.substr(0, dash));
  spec.target = parse_distribution(name.substr(dash + 1));
  spec.dim = dim;
  return spec;
}

std::span<const double> SamplePair::source(std::int64_t i) const {
  return std::span<const double>(u).subspan(static_cast<std::size_t>(i * dim),
                                            static_cast<std::size_t>(dim));
}

std::span<const double> SamplePair::target(std::int64_t j) const {
  return std::span<const double>(v).subspan(static_cast<std::size_t>(j * dim),
                                            static_cast<std::size_t>(dim));
}

std::vector<double> draw_points(Distribution kind, int dim, std::int64_t count,
                                std::uint64_t seed, bool target_stream) {
  if (dim < 1) fail(ErrorCode::kInvalidConfig, "dimension must be positive");
  if (count < 0) fail(ErrorCode::kInvalidConfig, "negative sample count");
  auto rng = make_rng(seed, target_stream ? Stream::kTargetSamples : Stream::kSourceSamples);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count * dim));
  for (std::int64_t k = 0; k < count; ++k) {
    switch (kind) {
      case Distribution::kUniform:
        for (int d = 0; d < dim; ++d) out.push_back(sym(rng));
        break;
      case Distribution::kNormal:
        for (int d = 0; d < dim; ++d) out.push_back(gauss(rng));
        break;
      case Distribution::kMixture: {
        const double center = unit(rng) < 0.5 ? -2.0 : 2.0;
        for (int d = 0; d < dim; ++d) out.push_back(center + gauss(rng));
        break;
      }
      case Distribution::kBeta:
        // Beta(1/2, 1/2) is the arcsine law: sin^2(pi U / 2). Mapped to [-1,1]
        // this is -cos(pi U).
        for (int d = 0; d < dim; ++d) out.push_back(-std::cos(std::numbers::pi * unit(rng)));
        break;
    }
  }
  return out;
}

SamplePair generate_samples(const ProblemSpec& problem, std::int64_t n, std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::kInvalidConfig, "sample count must be at least 1");
  SamplePair s;
  s.dim = problem.dim;
  s.seed = seed;
  s.kind_u = problem.source;
  s.kind_v = problem.target;
  s.u = draw_points(problem.source, problem.dim, n, seed, false);
  s.v = draw_points(problem.target, problem.dim, n, seed, true);
  return s;
}

Instance Instance::from_samples(const SamplePair& samples, std::int64_t scale) {
  if (samples.dim < 1) fail(ErrorCode::kInvalidInstance, "sample dimension must be positive");
  if (samples.u.empty() || samples.v.empty()) {
    fail(ErrorCode::kInvalidInstance, "empty sample set");
  }
  if (samples.u.size() % static_cast<std::size_t>(samples.dim) != 0 ||
      samples.v.size() % static_cast<std::size_t>(samples.dim) != 0) {
    fail(ErrorCode::kInvalidInstance, "sample coordinates do not match dimension " +
                                          std::to_string(samples.dim));
  }
  const std::int64_t n = samples.n();
  const std::int64_t m = samples.m();
  std::vector<double> cost(static_cast<std::size_t>(n * m));
  for (std::int64_t i = 0; i < n; ++i) {
    const auto ui = samples.source(i);
    for (std::int64_t j = 0; j < m; ++j) {
      const auto vj = samples.target(j);
      double c = 0.0;
      for (int d = 0; d < samples.dim; ++d) {
        const double diff = ui[d] - vj[d];
        c += diff * diff;
      }
      cost[static_cast<std::size_t>(i * m + j)] = c;
    }
  }
  // Uniform marginals 1/n and 1/m over the common denominator lcm(n, m).
  const std::int64_t g = std::gcd(n, m);
  std::vector<std::int64_t> p(static_cast<std::size_t>(n), m / g);
  std::vector<std::int64_t> q(static_cast<std::size_t>(m), n / g);
  return from_matrix(n, m, std::move(cost), std::move(p), std::move(q), scale);
}

Instance Instance::from_matrix(std::int64_t n, std::int64_t m, std::vector<double> cost,
                               std::vector<std::int64_t> supply,
                               std::vector<std::int64_t> demand, std::int64_t scale) {
  if (n < 1 || m < 1) fail(ErrorCode::kInvalidInstance, "need n >= 1 and m >= 1");
  if (scale < 1) fail(ErrorCode::kInvalidInstance, "cost scale must be >= 1");
  if (static_cast<std::int64_t>(cost.size()) != n * m) {
    fail(ErrorCode::kInvalidInstance, "cost matrix has " + std::to_string(cost.size()) +
                                          " entries, expected " + std::to_string(n * m));
  }
  if (static_cast<std::int64_t>(supply.size()) != n ||
      static_cast<std::int64_t>(demand.size()) != m) {
    fail(ErrorCode::kInvalidInstance, "marginal lengths do not match cost matrix shape");
  }
  Instance inst;
  inst.n_ = n;
  inst.m_ = m;
  inst.scale_ = scale;
  inst.cost_ = std::move(cost);
  inst.supply_ = std::move(supply);
  inst.demand_ = std::move(demand);
  inst.finish();
  return inst;
}

void Instance::finish() {
  std::int64_t sp = 0;
  std::int64_t dm = 0;
  for (auto v : supply_) {
    if (v < 0) fail(ErrorCode::kInvalidInstance, "negative supply mass");
    sp += v;
  }
  for (auto v : demand_) {
    if (v < 0) fail(ErrorCode::kInvalidInstance, "negative demand mass");
    dm += v;
  }
  if (sp != dm) {
    fail(ErrorCode::kInvalidInstance, "unbalanced marginals: sum(p) = " + std::to_string(sp) +
                                          " but sum(q) = " + std::to_string(dm) +
                                          " (mass units)");
  }
  if (sp == 0) fail(ErrorCode::kInvalidInstance, "total mass is zero");
  total_ = sp;

  constexpr double kLimit = 4.0e18;
  scaled_.resize(cost_.size());
  std::int64_t max_scaled = 0;
  for (std::size_t k = 0; k < cost_.size(); ++k) {
    const double c = cost_[k];
    if (!std::isfinite(c) || c < 0.0) {
      fail(ErrorCode::kInvalidInstance, "cost entries must be finite and nonnegative");
    }
    const double s = c * static_cast<double>(scale_);
    if (s > kLimit) fail(ErrorCode::kInvalidInstance, "scaled cost overflows 64 bits");
    scaled_[k] = std::llround(s);
    max_scaled = std::max(max_scaled, scaled_[k]);
  }
  // Objectives, potentials and reduced costs must all stay inside int64.
  const double bound = static_cast<double>(max_scaled) *
                       static_cast<double>(std::max(total_, num_nodes()));
  if (bound > kLimit) {
    fail(ErrorCode::kInvalidInstance,
         "scaled costs times total mass exceed 64-bit range; lower the scale");
  }
}

std::vector<double> Instance::supply_fractions() const {
  std::vector<double> out(supply_.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<double>(supply_[i]) / static_cast<double>(total_);
  }
  return out;
}

std::vector<double> Instance::demand_fractions() const {
  std::vector<double> out(demand_.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = static_cast<double>(demand_[j]) / static_cast<double>(total_);
  }
  return out;
}

double Instance::descale(std::int64_t scaled_objective) const {
  return static_cast<double>(scaled_objective) /
         (static_cast<double>(scale_) * static_cast<double>(total_));
}

std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> integer_masses(
    std::span<const double> p, std::span<const double> q) {
  double denom = 1.0;
  for (int digits = 0; digits <= 9; ++digits, denom *= 10.0) {
    auto convert = [denom](std::span<const double> xs, std::vector<std::int64_t>& out) {
      out.clear();
      for (double x : xs) {
        const double scaled = x * denom;
        const double r = std::round(scaled);
        if (std::abs(scaled - r) > 1e-6) return false;
        out.push_back(static_cast<std::int64_t>(r));
      }
      return true;
    };
    std::vector<std::int64_t> pi;
    std::vector<std::int64_t> qi;
    if (convert(p, pi) && convert(q, qi)) return {std::move(pi), std::move(qi)};
  }
  fail(ErrorCode::kInvalidInstance,
       "marginals are not representable with a power-of-ten denominator up to 1e9; "
       "give integer mass units instead");
}

std::int64_t TransportPlan::mass(std::int64_t i, std::int64_t j) const {
  std::int64_t total = 0;
  for (const auto& e : entries) {
    if (e.i == i && e.j == j) total += e.mass;
  }
  return total;
}

DensePlan to_dense(const TransportPlan& plan, const Instance& inst) {
  DensePlan d{plan.n, plan.m, std::vector<double>(static_cast<std::size_t>(plan.n * plan.m), 0.0)};
  const double total = static_cast<double>(inst.total_mass());
  for (const auto& e : plan.entries) d(e.i, e.j) += static_cast<double>(e.mass) / total;
  return d;
}

namespace {

void require_shape(std::int64_t n, std::int64_t m, const Instance& inst) {
  if (n != inst.n() || m != inst.m()) {
    fail(ErrorCode::kInvalidInstance, "plan is " + std::to_string(n) + "x" + std::to_string(m) +
                                          " but instance is " + std::to_string(inst.n()) + "x" +
                                          std::to_string(inst.m()));
  }
}

}  // namespace

Objective objective(const TransportPlan& plan, const Instance& inst) {
  require_shape(plan.n, plan.m, inst);
  Objective obj;
  for (const auto& e : plan.entries) {
    if (e.i < 0 || e.i >= inst.n() || e.j < 0 || e.j >= inst.m()) {
      fail(ErrorCode::kInvalidInstance, "plan entry outside the instance");
    }
    obj.scaled += inst.scaled_cost(e.i, e.j) * e.mass;
  }
  obj.value = inst.descale(obj.scaled);
  return obj;
}

double true_cost(const TransportPlan& plan, const Instance& inst) {
  require_shape(plan.n, plan.m, inst);
  double acc = 0.0;
  for (const auto& e : plan.entries) acc += inst.cost(e.i, e.j) * static_cast<double>(e.mass);
  return acc / static_cast<double>(inst.total_mass());
}

double true_cost(const DensePlan& plan, const Instance& inst) {
  require_shape(plan.n, plan.m, inst);
  double acc = 0.0;
  for (std::size_t k = 0; k < plan.x.size(); ++k) acc += inst.costs()[k] * plan.x[k];
  return acc;
}

std::string FeasibilityVerdict::describe() const {
  std::ostringstream os;
  if (feasible) {
    os << "feasible";
  } else if (negative_entry) {
    os << "infeasible: negative entry in row " << worst_index;
  } else {
    os << "infeasible: " << (worst_is_row ? "row " : "column ") << worst_index
       << " off by " << max_violation << " mass units";
  }
  return os.str();
}

FeasibilityVerdict check_feasibility(const TransportPlan& plan, const Instance& inst) {
  require_shape(plan.n, plan.m, inst);
  std::vector<std::int64_t> rows(static_cast<std::size_t>(inst.n()), 0);
  std::vector<std::int64_t> cols(static_cast<std::size_t>(inst.m()), 0);
  FeasibilityVerdict v;
  for (const auto& e : plan.entries) {
    if (e.mass < 0 && !v.negative_entry) {
      v.feasible = false;
      v.negative_entry = true;
      v.worst_is_row = true;
      v.worst_index = e.i;
    }
    rows[static_cast<std::size_t>(e.i)] += e.mass;
    cols[static_cast<std::size_t>(e.j)] += e.mass;
  }
  auto scan = [&](const std::vector<std::int64_t>& sums, std::span<const std::int64_t> target,
                  bool is_row) {
    for (std::size_t k = 0; k < sums.size(); ++k) {
      const std::int64_t r = std::abs(sums[k] - target[k]);
      if (r > v.max_violation) {
        v.max_violation = r;
        if (!v.negative_entry) {
          v.worst_is_row = is_row;
          v.worst_index = static_cast<std::int64_t>(k);
        }
      }
    }
  };
  scan(rows, inst.supplies(), true);
  scan(cols, inst.demands(), false);
  if (v.max_violation > 0) v.feasible = false;
  v.max_violation_fraction =
      static_cast<double>(v.max_violation) / static_cast<double>(inst.total_mass());
  return v;
}

FeasibilityVerdict check_feasibility(const DensePlan& plan, const Instance& inst,
                                     double tolerance) {
  require_shape(plan.n, plan.m, inst);
  const auto p = inst.supply_fractions();
  const auto q = inst.demand_fractions();
  std::vector<double> cols(static_cast<std::size_t>(plan.m), 0.0);
  FeasibilityVerdict v;
  double worst = 0.0;
  for (std::int64_t i = 0; i < plan.n; ++i) {
    double row = 0.0;
    for (std::int64_t j = 0; j < plan.m; ++j) {
      const double x = plan(i, j);
      if (x < 0.0 && !v.negative_entry) {
        v.negative_entry = true;
        v.worst_index = i;
      }
      row += x;
      cols[static_cast<std::size_t>(j)] += x;
    }
    const double r = std::abs(row - p[static_cast<std::size_t>(i)]);
    if (r > worst) {
      worst = r;
      if (!v.negative_entry) {
        v.worst_is_row = true;
        v.worst_index = i;
      }
    }
  }
  for (std::int64_t j = 0; j < plan.m; ++j) {
    const double r = std::abs(cols[static_cast<std::size_t>(j)] - q[static_cast<std::size_t>(j)]);
    if (r > worst) {
      worst = r;
      if (!v.negative_entry) {
        v.worst_is_row = false;
        v.worst_index = j;
      }
    }
  }
  v.max_violation_fraction = worst;
  v.max_violation = static_cast<std::int64_t>(std::ceil(worst * static_cast<double>(inst.total_mass())));
  v.feasible = !v.negative_entry && worst <= tolerance;
  return v;
}

}  // namespace otbcd
