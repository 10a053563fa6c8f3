// Acceptance checks. One PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Thresholds are pinned below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "otbcd/bcdns.hpp"
#include "otbcd/bench.hpp"
#include "otbcd/instance.hpp"
#include "otbcd/network_simplex.hpp"
#include "otbcd/oracles.hpp"
#include "otbcd/sinkhorn.hpp"

using namespace otbcd;

namespace {

constexpr std::int64_t kScale = 1'000'000;

// 1: exactness
constexpr int kExactInstancesPerFamily = 100;
constexpr std::int64_t kExactMinN = 5;
constexpr std::int64_t kExactMaxN = 60;
constexpr int kTinyInstancesPerSize = 20;  // n = m in {1, 2, 3}, nm <= 12
// 2: 1D oracle
constexpr int kOracleInstances = 20;
constexpr std::int64_t kOracleMinN = 50;
constexpr std::int64_t kOracleMaxN = 400;
// 4: efficiency
constexpr std::int64_t kEfficiencyN = 400;
constexpr int kEfficiencySeeds = 5;
constexpr double kMaxEvalRatio = 1.0 / 3.0;
constexpr double kMinSpeedup = 2.0;
// 5: grid
constexpr std::int64_t kGridN = 250;
// 6: Sinkhorn bias
constexpr std::int64_t kSinkhornN = 200;
constexpr double kFeasibilityTolerance = 1e-12;
// 7: large scale
constexpr std::int64_t kLargeN = 4000;
constexpr std::int64_t kLargeFallbackN = 2000;
constexpr double kLargeBudgetSeconds = 30 * 60;
// 8: anti-cycling
constexpr std::int64_t kDegenerateN = 40;
constexpr std::int64_t kPivotFactor = 10;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Verdict& v, double seconds) {
  std::printf("[%s] criterion %d: %s (%s; %.1fs)\n", v.pass ? "PASS" : "FAIL", id, name.c_str(),
              v.detail.c_str(), seconds);
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

std::int64_t ns_objective(const Instance& inst, std::int64_t* evals = nullptr) {
  auto s = northwest_corner(inst);
  solve_full(s);
  if (evals) *evals = s.counters().evaluations;
  return s.objective();
}

// Shared by criteria 1-3: every block-coordinate run is recorded here.
struct RunLog {
  std::int64_t runs = 0;
  std::int64_t monotonicity_violations = 0;
  std::int64_t uncertified = 0;
  void add(const BcdResult& r) {
    ++runs;
    monotonicity_violations += r.report.monotonicity_violations();
    if (!r.report.complete || !r.report.certificate.optimal()) ++uncertified;
  }
};

RunLog block_runs;

struct BlockPair {
  std::int64_t rs = 0;
  std::int64_t gs = 0;
};

BlockPair run_both(const Instance& inst, std::uint64_t seed) {
  auto cfg = BlockConfig::defaults_for(inst.n());
  cfg.seed = seed;
  auto rs = rs_bcdns(inst, cfg);
  auto gs = gs_bcdns(inst, cfg);
  block_runs.add(rs);
  block_runs.add(gs);
  return {rs.state.objective(), gs.state.objective()};
}

Verdict exactness() {
  Verdict v;
  std::mt19937_64 pick(20240601);
  std::uniform_int_distribution<std::int64_t> size(kExactMinN, kExactMaxN);
  std::int64_t checked = 0;
  std::int64_t mismatches = 0;
  std::int64_t brute = 0;
  std::int64_t brute_mismatches = 0;
  for (const char* family : {"uniform-normal", "normal-mixture"}) {
    const auto problem = parse_problem(family);
    for (int k = 0; k < kExactInstancesPerFamily; ++k) {
      const auto n = size(pick);
      const auto seed = static_cast<std::uint64_t>(1000 + k);
      const auto inst = Instance::from_samples(generate_samples(problem, n, seed), kScale);
      const auto ns = ns_objective(inst);
      const auto both = run_both(inst, seed);
      ++checked;
      if (both.rs != ns || both.gs != ns) ++mismatches;
    }
    // n >= 5 gives nm > 12, so the brute-force comparison uses tiny instances
    // from the same family.
    for (std::int64_t n = 1; n <= 3; ++n) {
      for (int k = 0; k < kTinyInstancesPerSize; ++k) {
        const auto seed = static_cast<std::uint64_t>(5000 + k);
        const auto inst = Instance::from_samples(generate_samples(problem, n, seed), kScale);
        const auto ns = ns_objective(inst);
        const auto both = run_both(inst, seed);
        const auto bf = oracle_lp_bruteforce(inst).scaled;
        ++brute;
        if (both.rs != ns || both.gs != ns) ++mismatches;
        if (bf != ns) ++brute_mismatches;
      }
    }
  }
  std::ostringstream os;
  os << checked << " instances n in [" << kExactMinN << "," << kExactMaxN << "] + " << brute
     << " brute-force instances; NS/RS/GS mismatches " << mismatches
     << ", brute-force mismatches " << brute_mismatches;
  v.pass = mismatches == 0 && brute_mismatches == 0;
  v.detail = os.str();
  return v;
}

Verdict oracle_agreement() {
  Verdict v;
  const auto problem = parse_problem("uniform-normal");
  double worst_ratio = 0.0;
  std::int64_t failed = 0;
  std::int64_t block_failed = 0;
  for (int k = 0; k < kOracleInstances; ++k) {
    const std::int64_t n =
        kOracleMinN + (kOracleMaxN - kOracleMinN) * k / (kOracleInstances - 1);
    const auto seed = static_cast<std::uint64_t>(300 + k);
    const auto samples = generate_samples(problem, n, seed);
    const auto inst = Instance::from_samples(samples, kScale);
    const auto ns = ns_objective(inst);
    const double diff = std::abs(inst.descale(ns) - oracle_1d_monotone(samples, inst));
    const double tol = static_cast<double>(n * n) / static_cast<double>(kScale);
    worst_ratio = std::max(worst_ratio, diff / tol);
    if (diff > tol) ++failed;
    const auto both = run_both(inst, seed);
    if (both.rs != ns || both.gs != ns) ++block_failed;
  }
  std::ostringstream os;
  os << kOracleInstances << " instances n in [" << kOracleMinN << "," << kOracleMaxN
     << "]; outside n^2/S: " << failed << ", worst |diff|/(n^2/S) = " << worst_ratio
     << "; RS/GS mismatches vs NS: " << block_failed;
  v.pass = failed == 0 && block_failed == 0;
  v.detail = os.str();
  return v;
}

Verdict monotone_outer() {
  Verdict v;
  std::ostringstream os;
  os << block_runs.runs << " RS/GS runs; monotonicity violations "
     << block_runs.monotonicity_violations << ", runs without certificate "
     << block_runs.uncertified;
  v.pass = block_runs.runs > 0 && block_runs.monotonicity_violations == 0 &&
           block_runs.uncertified == 0;
  v.detail = os.str();
  return v;
}

Verdict efficiency() {
  Verdict v;
  const auto problem = parse_problem("uniform-normal");
  double ns_evals = 0.0;
  double gs_evals = 0.0;
  double ns_time = 0.0;
  double gs_time = 0.0;
  bool exact = true;
  for (int k = 0; k < kEfficiencySeeds; ++k) {
    const auto seed = static_cast<std::uint64_t>(k + 1);
    const auto inst = Instance::from_samples(generate_samples(problem, kEfficiencyN, seed), kScale);
    const auto ns = run_exact(Method::kNs, inst, ExactSettings{}, seed);
    const auto gs = run_exact(Method::kGsBcdns, inst, ExactSettings{}, seed);
    exact = exact && ns.objective == gs.objective && gs.certificate.optimal();
    ns_evals += static_cast<double>(ns.evaluations);
    gs_evals += static_cast<double>(gs.evaluations);
    ns_time += ns.seconds;
    gs_time += gs.seconds;
  }
  const double ratio = gs_evals / ns_evals;
  const double speedup = ns_time / gs_time;
  std::ostringstream os;
  os << "n=" << kEfficiencyN << ", " << kEfficiencySeeds << " seeds: mean evals NS "
     << ns_evals / kEfficiencySeeds << " GS " << gs_evals / kEfficiencySeeds << " (ratio "
     << ratio << ", need <= " << kMaxEvalRatio << "); mean time NS " << ns_time / kEfficiencySeeds
     << "s GS " << gs_time / kEfficiencySeeds << "s (speedup " << speedup << ", need >= "
     << kMinSpeedup << ")";
  v.pass = exact && ratio <= kMaxEvalRatio && speedup >= kMinSpeedup;
  v.detail = os.str();
  return v;
}

Verdict grid_sanity() {
  Verdict v;
  const double n = static_cast<double>(kGridN);
  const double s_small = 2.0 / n;
  const double t_small = 20.0 / n;
  const auto grid = run_grid(parse_problem("uniform-normal"), kGridN, 1, {s_small, 0.5},
                             {t_small, 0.9}, kScale, BlockConfig{});
  const auto* a = grid.find(s_small, t_small);
  const auto* b = grid.find(0.5, 0.9);
  if (!a || !b) {
    v.pass = false;
    v.detail = "grid cells missing";
    return v;
  }
  std::ostringstream os;
  os << "n=" << kGridN << ": (2/n,20/n) evals " << a->evaluations << " time " << a->seconds
     << "s; (0.5,0.9) evals " << b->evaluations << " time " << b->seconds << "s";
  bool same = true;
  for (const auto& c : grid.cells) same = same && c.objective == a->objective && c.certified;
  v.pass = same && a->seconds < b->seconds && a->evaluations < b->evaluations;
  v.detail = os.str();
  return v;
}

Verdict sinkhorn_bias() {
  Verdict v;
  SinkhornConfig sk;  // objective-change stop, delta 1e-6, 2000 s budget
  // Rounding every iterate would double the run; every tenth is checked.
  sk.trace_stride = 10;
  const auto study = run_gap_vs_time(parse_problem("uniform-normal"), kSinkhornN, 1,
                                     {1e-1, 1e-3}, kScale, ExactSettings{}, sk);
  const auto& gs = study.traces[0];
  const auto& coarse = study.traces[1];
  const auto& fine = study.traces[2];
  bool nonnegative = true;
  bool feasible = true;
  for (const auto& tr : study.traces) {
    for (const auto& pt : tr.points) nonnegative = nonnegative && pt.gap >= 0.0;
    if (tr.method == Method::kSinkhorn) {
      feasible = feasible && tr.all_feasible && tr.max_residual <= kFeasibilityTolerance;
    }
  }
  std::ostringstream os;
  os << "n=" << kSinkhornN << ": gap(1e-1) " << coarse.final_gap << " gap(1e-3) "
     << fine.final_gap << " converged " << coarse.converged << "/" << fine.converged
     << ", max rounded residual " << std::max(coarse.max_residual, fine.max_residual)
     << ", GS final gap (scaled) " << gs.final_gap_scaled;
  v.pass = coarse.converged && fine.converged && coarse.final_gap > fine.final_gap &&
           fine.final_gap >= 0.0 && nonnegative && feasible && gs.final_gap_scaled == 0;
  v.detail = os.str();
  return v;
}

struct OverBudget {};

Verdict large_scale() {
  Verdict v;
  const auto problem = parse_problem("uniform-beta");
  auto attempt = [&](std::int64_t n, double budget) {
    auto cfg = BlockConfig::defaults_for(n);
    const auto t0 = Clock::now();
    cfg.on_iteration = [&](const OuterIteration&, const SimplexState&) {
      if (since(t0) > budget) throw OverBudget{};
    };
    return run_large_scale(problem, n, 1, {10, 20, 50, 100}, kScale, cfg);
  };
  LargeScaleReport rep;
  bool scaled_down = false;
  try {
    rep = attempt(kLargeN, kLargeBudgetSeconds);
  } catch (const OverBudget&) {
    scaled_down = true;
    rep = attempt(kLargeFallbackN, kLargeBudgetSeconds);
  }
  std::ostringstream os;
  os << (scaled_down ? "SCALED DOWN " : "") << "n=" << rep.n << ": " << rep.outer.outer_iterations
     << " epochs, " << rep.outer.seconds << "s, certificate min r "
     << rep.outer.certificate.min_reduced_cost << ", |cost - oracle| "
     << std::abs(rep.descaled - rep.oracle) << " (tol " << rep.tolerance << ")";
  v.pass = rep.outer.complete && rep.outer.certificate.optimal() && rep.matches_oracle;
  v.detail = os.str();
  return v;
}

Verdict anti_cycling() {
  Verdict v;
  // Equal masses everywhere; costs take three values in a periodic pattern,
  // so the optimum is hugely degenerate and ties are everywhere.
  const std::int64_t n = kDegenerateN;
  std::vector<double> cost(static_cast<std::size_t>(n * n));
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) cost[i * n + j] = static_cast<double>((i * j + i + j) % 3);
  }
  const auto inst = Instance::from_matrix(n, n, cost, std::vector<std::int64_t>(n, 1),
                                          std::vector<std::int64_t>(n, 1), kScale);
  const auto limit = kPivotFactor * inst.num_arcs();

  SimplexOptions opt;
  opt.degenerate_streak_limit = 5;
  opt.max_pivots = limit + 1;
  auto ns = northwest_corner(inst);
  const auto ns_rep = solve_full(ns, opt);
  const auto ns_cert = certify_optimal(ns);

  auto cfg = BlockConfig::defaults_for(n);
  cfg.subproblem = opt;
  cfg.subproblem.max_pivots = -1;
  cfg.check_invariants = true;
  const auto gs = gs_bcdns(inst, cfg);

  std::ostringstream os;
  os << n << "x" << n << " degenerate: NS " << ns_rep.pivots << " pivots (" << ns_rep.degenerate_pivots
     << " degenerate, " << ns_rep.bland_pivots << " Bland), GS " << gs.report.pivots
     << " pivots; limit " << limit;
  v.pass = ns_rep.optimal && ns_rep.pivots <= limit && ns_cert.optimal() &&
           gs.report.complete && gs.report.certificate.optimal() && gs.report.pivots <= limit &&
           gs.state.objective() == ns.objective();
  v.detail = os.str();
  return v;
}

void run(int id, const std::string& name, const std::function<Verdict()>& check) {
  const auto t0 = Clock::now();
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = std::string("exception: ") + e.what();
  }
  report(id, name, v, since(t0));
}

}  // namespace

int main() {
  run(1, "exactness equivalence", exactness);
  run(2, "1D oracle agreement", oracle_agreement);
  run(3, "monotone outer objective", monotone_outer);
  run(4, "efficiency trend", efficiency);
  run(5, "grid-study sanity", grid_sanity);
  run(6, "Sinkhorn bias ordering", sinkhorn_bias);
  run(7, "large-scale finite termination", large_scale);
  run(8, "anti-cycling regression", anti_cycling);
  std::printf("%d of 8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
