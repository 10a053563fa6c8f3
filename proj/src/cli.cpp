#include "otbcd/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <sstream>

#include "otbcd/bcdns.hpp"
#include "otbcd/bench.hpp"
#include "otbcd/error.hpp"
#include "otbcd/instance.hpp"
#include "otbcd/io.hpp"
#include "otbcd/network_simplex.hpp"
#include "otbcd/oracles.hpp"
#include "otbcd/sinkhorn.hpp"

namespace otbcd::cli {
namespace {

namespace fs = std::filesystem;

struct SourceOptions {
  std::string instance;
  std::string problem = "uniform-normal";
  std::int64_t n = 50;
  std::uint64_t seed = 1;
  int dim = 1;
  std::int64_t scale = 0;  // 0: the file's value, else the default
};

void add_source_options(CLI::App* app, SourceOptions& src, bool allow_file) {
  if (allow_file) app->add_option("--instance", src.instance, "Instance JSON file");
  app->add_option("--problem", src.problem, "uniform-normal | normal-mixture | uniform-beta");
  app->add_option("--n", src.n, "Sample count per side")->check(CLI::PositiveNumber);
  app->add_option("--seed", src.seed, "RNG seed");
  app->add_option("--dim", src.dim, "Point dimension (1 or 2)")->check(CLI::Range(1, 2));
  app->add_option("--scale", src.scale, "Integer cost scale S")->check(CLI::PositiveNumber);
}

InstanceFile load_source(const SourceOptions& src) {
  if (!src.instance.empty()) return load_instance(src.instance, src.scale);
  const auto problem = parse_problem(src.problem, src.dim);
  auto samples = generate_samples(problem, src.n, src.seed);
  auto inst = Instance::from_samples(samples, src.scale > 0 ? src.scale : kDefaultScale);
  return {std::move(samples), std::move(inst)};
}

Json source_json(const SourceOptions& src) {
  if (!src.instance.empty()) {
    Json j{{"instance", src.instance}};
    if (src.scale > 0) j["scale"] = src.scale;
    return j;
  }
  return Json{{"problem", src.problem}, {"n", src.n},         {"seed", src.seed},
              {"dim", src.dim},         {"scale", src.scale > 0 ? src.scale : kDefaultScale}};
}

unsigned thread_cap() {
  if (const char* v = std::getenv("OT_THREADS")) {
    const long parsed = std::strtol(v, nullptr, 10);
    if (parsed >= 1) return static_cast<unsigned>(parsed);
  }
  return 1;
}

std::string eps_label(double eps) {
  std::ostringstream os;
  os << eps;
  return os.str();
}

// ---------------------------------------------------------------- gen

struct GenOptions {
  SourceOptions src;
  std::string out;
};

int cmd_gen(const GenOptions& opt, std::ostream& out) {
  const auto problem = parse_problem(opt.src.problem, opt.src.dim);
  const auto samples = generate_samples(problem, opt.src.n, opt.src.seed);
  const auto scale = opt.src.scale > 0 ? opt.src.scale : kDefaultScale;
  Instance::from_samples(samples, scale);  // validates
  write_json(opt.out, samples_to_json(samples, scale));
  out << "wrote " << opt.out << " (" << samples.n() << "x" << samples.m() << ", "
      << problem.name() << ", dim " << problem.dim << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------- solve

struct SolveOptions {
  SourceOptions src;
  std::string method;
  std::optional<double> s;
  std::optional<double> t;
  std::int64_t block_size = 0;
  double exploration = 0.1;
  std::int64_t threshold = 0;
  int resample_cap = 32;
  std::string pricing = "most-negative";
  std::int64_t degenerate_limit = 50;
  std::int64_t max_outer = -1;
  std::int64_t max_pivots = -1;
  double eps = 1e-2;
  double gamma = 0.0;
  double delta = 1e-6;
  double budget = 2000.0;
  std::string sinkhorn_stop = "objective-change";
  std::int64_t trace_stride = 1;
  std::int64_t check_every = 1000;
  std::string report;
  std::string plan;
  std::string iterations_csv;
  std::string trace_csv;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int cmd_solve(const SolveOptions& opt, std::ostream& out) {
  const Method method = parse_method(opt.method);
  if (method == Method::kGsBcdns && opt.s.has_value() != opt.t.has_value()) {
    throw UsageError("gs-bcdns needs both --s and --t (or neither for the 2/n, 20/n defaults)");
  }
  auto source = load_source(opt.src);
  const auto& inst = source.instance;

  Json config = {{"command", "solve"},
                 {"method", opt.method},
                 {"source", source_json(opt.src)},
                 {"schema_version", kSchemaVersion}};
  SimplexOptions ns;
  ns.pricing = parse_pricing(opt.pricing);
  ns.degenerate_streak_limit = opt.degenerate_limit;
  ns.max_pivots = opt.max_pivots;

  Json report = {{"schema_version", kSchemaVersion},
                 {"n", inst.n()},
                 {"m", inst.m()},
                 {"scale", inst.scale()},
                 {"total_mass", inst.total_mass()}};
  int status = kExitOk;

  if (method == Method::kSinkhorn) {
    SinkhornConfig sc;
    sc.epsilon = opt.eps;
    sc.gamma = opt.gamma;
    sc.delta = opt.delta;
    sc.max_seconds = opt.budget;
    sc.trace_stride = opt.trace_stride;
    sc.check_every = opt.check_every;
    sc.stop = opt.sinkhorn_stop == "scaling-change" ? SinkhornStop::kScalingChange
                                                    : SinkhornStop::kObjectiveChange;
    if (opt.sinkhorn_stop != "scaling-change" && opt.sinkhorn_stop != "objective-change") {
      throw UsageError("--sinkhorn-stop must be objective-change or scaling-change");
    }
    sc.threads = thread_cap();
    const auto result = sinkhorn_solve(inst, sc);
    config["sinkhorn"] = {{"epsilon", sc.epsilon}, {"gamma", result.gamma},
                          {"delta", sc.delta},     {"budget_s", sc.max_seconds},
                          {"stop", std::string(to_string(sc.stop))},
                          {"trace_stride", sc.trace_stride},
                          {"check_every", sc.check_every}};
    report["config"] = config;
    report["sinkhorn"] = to_json(result, inst);
    report["objective"] = result.objective_rounded;
    if (!opt.trace_csv.empty()) write_sinkhorn_trace_csv(opt.trace_csv, config, result);
    out << "sinkhorn: objective " << result.objective_rounded << " after " << result.iterations
        << " iterations" << (result.truncated ? " (budget exhausted)" : "") << '\n';
    status = result.converged ? kExitOk : kExitNotCertified;
  } else if (method == Method::kNs) {
    config["pricing"] = opt.pricing;
    config["degenerate_limit"] = opt.degenerate_limit;
    config["init"] = "northwest-corner";
    auto state = northwest_corner(inst);
    const auto solve = solve_full(state, ns);
    const auto before = state.counters().evaluations;
    const auto cert = certify_optimal(state);
    state.counters().evaluations = before;
    report["config"] = config;
    report["solve"] = to_json(solve, inst);
    report["objective_scaled"] = state.objective();
    report["objective"] = inst.descale(state.objective());
    report["certificate"] = to_json(cert);
    report["feasibility"] = check_feasibility(state.plan(), inst).describe();
    if (!opt.plan.empty()) write_json(opt.plan, basis_to_json(state));
    out << "ns: objective " << inst.descale(state.objective()) << " (scaled "
        << state.objective() << "), " << solve.pivots << " pivots, " << solve.evaluations
        << " evaluations, certificate " << (cert.optimal() ? "optimal" : "NOT optimal") << '\n';
    status = cert.optimal() ? kExitOk : kExitNotCertified;
  } else {
    BlockConfig bc = BlockConfig::defaults_for(inst.n());
    if (opt.s) bc.s = *opt.s;
    if (opt.t) bc.t = *opt.t;
    bc.block_size = opt.block_size;
    bc.exploration = opt.exploration;
    bc.threshold = ThresholdSchedule::constant(opt.threshold);
    bc.resample_cap = opt.resample_cap;
    bc.seed = opt.src.seed;
    bc.subproblem = ns;
    bc.max_outer = opt.max_outer;
    config["s"] = bc.s;
    config["t"] = bc.t;
    config["block_size"] = bc.block_size;
    config["exploration"] = bc.exploration;
    config["threshold"] = bc.threshold.name;
    config["resample_cap"] = bc.resample_cap;
    config["pricing"] = opt.pricing;
    config["degenerate_limit"] = opt.degenerate_limit;
    config["init"] = "northwest-corner";
    config["block_seed"] = bc.seed;
    auto result = method == Method::kGsBcdns ? gs_bcdns(inst, bc) : rs_bcdns(inst, bc);
    report["config"] = config;
    report["outer"] = to_json(result.report, inst);
    report["objective_scaled"] = result.state.objective();
    report["objective"] = inst.descale(result.state.objective());
    report["certificate"] = to_json(result.report.certificate);
    report["feasibility"] = check_feasibility(result.state.plan(), inst).describe();
    if (!opt.plan.empty()) write_json(opt.plan, basis_to_json(result.state));
    if (!opt.iterations_csv.empty()) write_iterations_csv(opt.iterations_csv, config, result.report);
    out << opt.method << ": objective " << inst.descale(result.state.objective()) << " (scaled "
        << result.state.objective() << "), " << result.report.outer_iterations << " outer, "
        << result.report.pivots << " pivots, " << result.report.evaluations
        << " evaluations, certificate "
        << (result.report.certificate.optimal() ? "optimal" : "NOT optimal") << '\n';
    status = result.report.complete && result.report.certificate.optimal() ? kExitOk
                                                                           : kExitNotCertified;
  }
  if (!opt.report.empty()) {
    write_json(opt.report, report);
  } else {
    out << report.dump(2) << '\n';
  }
  return status;
}

// ---------------------------------------------------------------- certify

struct CertifyOptions {
  std::string instance;
  std::string plan;
  std::int64_t scale = 0;
};

int cmd_certify(const CertifyOptions& opt, std::ostream& out) {
  const auto source = load_instance(opt.instance, opt.scale);
  const auto& inst = source.instance;
  const auto file = plan_from_json(read_json(opt.plan));
  if (file.total_mass != 0 && file.total_mass != inst.total_mass()) {
    out << "plan mass unit 1/" << file.total_mass << " differs from instance unit 1/"
        << inst.total_mass() << '\n';
    return kExitNotCertified;
  }
  const auto verdict = check_feasibility(file.plan, inst);
  out << "feasibility: " << verdict.describe() << '\n';
  if (!verdict.feasible) return kExitNotCertified;
  const auto obj = objective(file.plan, inst);
  out << "objective: " << obj.value << " (scaled " << obj.scaled << ")\n";

  // Warm-start from the plan's arcs when they form a spanning tree; the plan
  // is optimal iff the simplex cannot improve on it.
  std::vector<ArcId> arcs;
  std::vector<std::int64_t> flows;
  for (const auto& e : file.plan.entries) {
    arcs.push_back(inst.arc(e.i, e.j));
    flows.push_back(e.mass);
  }
  std::optional<SimplexState> state;
  try {
    state.emplace(inst, arcs, flows);
  } catch (const Error&) {
    state.reset();
  }
  if (!state) {
    out << "plan arcs do not form a spanning tree; solving from the northwest corner\n";
    state.emplace(northwest_corner(inst));
  }
  const auto cert = certify_optimal(*state);
  if (state->objective() == obj.scaled && cert.optimal()) {
    out << "certificate: optimal (min reduced cost " << cert.min_reduced_cost << ")\n";
    return kExitOk;
  }
  solve_full(*state);
  const bool optimal = state->objective() == obj.scaled;
  out << "certificate: " << (optimal ? "optimal" : "NOT optimal") << " (optimum scaled "
      << state->objective() << ")\n";
  return optimal ? kExitOk : kExitNotCertified;
}

// ---------------------------------------------------------------- bench

struct BenchOptions {
  std::string problem = "uniform-normal";
  std::int64_t n = 0;
  std::uint64_t seed = 1;
  int dim = 1;
  std::int64_t scale = kDefaultScale;
  std::string out_dir = ".";
  std::vector<double> s_list;
  std::vector<double> t_list;
  std::vector<std::int64_t> n_list{50, 100, 150, 200, 250, 300, 350, 400};
  std::vector<std::string> methods{"ns", "rs-bcdns", "gs-bcdns"};
  std::vector<std::uint64_t> seeds;
  std::int64_t rs_block_size = 256;
  std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4};
  double budget = 2000.0;
  double delta = 1e-6;
  std::int64_t trace_stride = 1;
  std::int64_t check_every = 1000;
  std::vector<std::int64_t> checkpoints{10, 20, 50, 100};
  std::string pricing = "most-negative";
};

Json bench_config(const std::string& experiment, const BenchOptions& o) {
  return Json{{"command", "bench"},     {"experiment", experiment}, {"problem", o.problem},
              {"dim", o.dim},           {"seed", o.seed},           {"scale", o.scale},
              {"pricing", o.pricing},   {"schema_version", kSchemaVersion}};
}

int bench_grid(BenchOptions o, std::ostream& out) {
  if (o.n == 0) o.n = 250;
  const double nn = static_cast<double>(o.n);
  if (o.s_list.empty()) {
    for (double k : {1.0, 2.0, 3.0, 5.0, 10.0, 25.0}) o.s_list.push_back(k / nn);
  }
  if (o.t_list.empty()) {
    for (double k : {5.0, 10.0, 20.0, 30.0, 50.0, 100.0}) o.t_list.push_back(std::min(1.0, k / nn));
  }
  auto config = bench_config("grid", o);
  config["n"] = o.n;
  config["s_list"] = o.s_list;
  config["t_list"] = o.t_list;
  BlockConfig base;
  base.subproblem.pricing = parse_pricing(o.pricing);
  const auto grid = run_grid(parse_problem(o.problem, o.dim), o.n, o.seed, o.s_list, o.t_list,
                             o.scale, base, [&](const GridCell& c) {
                               out << "s=" << c.s << " t=" << c.t << " evals=" << c.evaluations
                                   << " pivots=" << c.pivots << " time=" << c.seconds << "s"
                                   << (c.certified ? "" : " UNCERTIFIED") << '\n';
                             });
  const auto path = fs::path(o.out_dir) / ("grid_results_" + std::to_string(o.n) + ".csv");
  write_grid_csv(path, config, grid);
  out << "wrote " << path.string() << '\n';
  const bool ok = std::all_of(grid.cells.begin(), grid.cells.end(),
                              [](const GridCell& c) { return c.certified; });
  return ok ? kExitOk : kExitNotCertified;
}

int bench_compare(const BenchOptions& o, std::ostream& out) {
  std::vector<Method> methods;
  for (const auto& m : o.methods) methods.push_back(parse_method(m));
  const auto seeds = o.seeds.empty() ? std::vector<std::uint64_t>{o.seed} : o.seeds;
  auto config = bench_config("compare", o);
  config["n_list"] = o.n_list;
  config["methods"] = o.methods;
  config["seeds"] = seeds;
  config["rs_block_size"] = o.rs_block_size;
  config["s"] = "2/n";
  config["t"] = "20/n";
  ExactSettings settings;
  settings.ns.pricing = parse_pricing(o.pricing);
  settings.block.subproblem.pricing = settings.ns.pricing;
  settings.rs_block_size = o.rs_block_size;
  const auto rows = run_comparison(
      parse_problem(o.problem, o.dim), o.n_list, methods, seeds, o.scale, settings,
      [&](const ComparisonRow& r) {
        out << "n=" << r.n << " seed=" << r.seed << " " << to_string(r.method)
            << " objective=" << r.objective << " evals=" << r.evaluations
            << " time=" << r.runtime_s << "s speedup=" << r.speedup_vs_ns << '\n';
      });
  const auto path = fs::path(o.out_dir) / ("comparison_" + o.problem + ".csv");
  write_comparison_csv(path, config, rows);
  out << "wrote " << path.string() << '\n';
  return kExitOk;
}

int bench_gap(BenchOptions o, std::ostream& out) {
  if (o.n == 0) o.n = 200;
  auto config = bench_config("gap", o);
  config["n"] = o.n;
  config["eps"] = o.eps;
  config["budget_s"] = o.budget;
  config["delta"] = o.delta;
  config["sinkhorn_stop"] = "objective-change";
  config["check_every"] = o.check_every;
  config["trace_stride"] = o.trace_stride;
  config["s"] = "2/n";
  config["t"] = "20/n";
  ExactSettings settings;
  settings.ns.pricing = parse_pricing(o.pricing);
  settings.block.subproblem.pricing = settings.ns.pricing;
  SinkhornConfig sc;
  sc.delta = o.delta;
  sc.max_seconds = o.budget;
  sc.trace_stride = o.trace_stride;
  sc.check_every = o.check_every;
  sc.threads = thread_cap();
  const auto study =
      run_gap_vs_time(parse_problem(o.problem, o.dim), o.n, o.seed, o.eps, o.scale, settings, sc);
  bool ok = true;
  for (const auto& trace : study.traces) {
    const std::string label = trace.method == Method::kSinkhorn ? eps_label(trace.epsilon) : "exact";
    const auto path = fs::path(o.out_dir) /
                      ("gap_trace_" + std::string(to_string(trace.method)) + "_" + label + ".csv");
    write_gap_trace_csv(path, config, trace);
    out << to_string(trace.method) << " " << label << ": final gap " << trace.final_gap
        << (trace.truncated ? " (budget exhausted)" : "") << " -> " << path.string() << '\n';
    ok = ok && (trace.method != Method::kGsBcdns || trace.final_gap_scaled == 0);
  }
  return ok ? kExitOk : kExitNotCertified;
}

int bench_large(BenchOptions o, std::ostream& out) {
  if (o.n == 0) o.n = 4000;
  if (o.problem == "uniform-normal") o.problem = "uniform-beta";
  auto config = bench_config("large", o);
  config["n"] = o.n;
  config["checkpoints"] = o.checkpoints;
  config["s"] = "2/n";
  config["t"] = "20/n";
  BlockConfig bc = BlockConfig::defaults_for(o.n);
  bc.subproblem.pricing = parse_pricing(o.pricing);
  bc.on_iteration = [&](const OuterIteration& it, const SimplexState&) {
    if ((it.k + 1) % 50 == 0) {
      out << "epoch " << it.k + 1 << ": objective " << it.objective << " at " << it.seconds
          << "s\n";
    }
  };
  const auto report =
      run_large_scale(parse_problem(o.problem, 1), o.n, o.seed, o.checkpoints, o.scale, bc);
  for (const auto& snap : report.snapshots) {
    const std::string label = snap.epoch < 0 ? "final" : std::to_string(snap.epoch);
    const auto path = fs::path(o.out_dir) /
                      ("barycentric_" + std::to_string(o.n) + "_" + label + ".csv");
    write_barycentric_csv(path, config, report.samples, snap);
  }
  Json summary = {{"config", config},
                  {"outer", to_json(report.outer, Instance::from_samples(report.samples, o.scale))},
                  {"descaled_objective", report.descaled},
                  {"oracle_1d", report.oracle},
                  {"tolerance", report.tolerance},
                  {"matches_oracle", report.matches_oracle}};
  summary["outer"].erase("iterations");
  write_json(fs::path(o.out_dir) / ("large_" + std::to_string(o.n) + ".json"), summary);
  out << "epochs " << report.outer.outer_iterations << ", objective " << report.descaled
      << ", oracle " << report.oracle << ", certificate "
      << (report.outer.certificate.optimal() ? "optimal" : "NOT optimal") << '\n';
  return report.outer.complete && report.matches_oracle ? kExitOk : kExitNotCertified;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact optimal transport with block coordinate network simplex"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Sample an instance and write it as JSON");
  add_source_options(gen_cmd, gen.src, false);
  gen_cmd->add_option("--out", gen.out, "Output instance file")->required();

  SolveOptions solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance");
  add_source_options(solve_cmd, solve.src, true);
  solve_cmd->add_option("--method", solve.method, "ns | rs-bcdns | gs-bcdns | sinkhorn")
      ->required()
      ->check(CLI::IsMember({"ns", "rs-bcdns", "gs-bcdns", "sinkhorn"}));
  solve_cmd->add_option("--s", solve.s, "Working-set fraction");
  solve_cmd->add_option("--t", solve.t, "Screening fraction (gs-bcdns)");
  solve_cmd->add_option("--block-size", solve.block_size, "Absolute block size override");
  solve_cmd->add_option("--exploration", solve.exploration, "Unlikely-group slice as a fraction of tN");
  solve_cmd->add_option("--threshold", solve.threshold, "Constant regrading threshold e_k (scaled)");
  solve_cmd->add_option("--resample-cap", solve.resample_cap, "RS resampling attempts");
  solve_cmd->add_option("--pricing", solve.pricing, "most-negative | bland")
      ->check(CLI::IsMember({"most-negative", "bland"}));
  solve_cmd->add_option("--degenerate-limit", solve.degenerate_limit,
                        "Degenerate pivots before the Bland fallback");
  solve_cmd->add_option("--max-outer", solve.max_outer, "Safety cap on outer iterations");
  solve_cmd->add_option("--max-pivots", solve.max_pivots, "Safety cap on pivots (ns)");
  solve_cmd->add_option("--eps", solve.eps, "Sinkhorn accuracy parameter");
  solve_cmd->add_option("--gamma", solve.gamma, "Sinkhorn regularization (default eps/(4 ln n))");
  solve_cmd->add_option("--delta", solve.delta, "Sinkhorn stopping tolerance");
  solve_cmd->add_option("--budget", solve.budget, "Sinkhorn time budget in seconds");
  solve_cmd->add_option("--sinkhorn-stop", solve.sinkhorn_stop, "objective-change | scaling-change");
  solve_cmd->add_option("--trace-stride", solve.trace_stride, "Sinkhorn iterations per trace row");
  solve_cmd->add_option("--check-every", solve.check_every,
                        "Sinkhorn iterations between objective-change checks");
  solve_cmd->add_option("--report", solve.report, "Report JSON path (stdout if omitted)");
  solve_cmd->add_option("--plan", solve.plan, "Write the final basis as a plan file");
  solve_cmd->add_option("--iterations-csv", solve.iterations_csv, "Per-iteration CSV (bcdns)");
  solve_cmd->add_option("--trace-csv", solve.trace_csv, "Trace CSV (sinkhorn)");

  CertifyOptions certify;
  auto* certify_cmd = app.add_subcommand("certify", "Check a plan file for feasibility and optimality");
  certify_cmd->add_option("--instance", certify.instance, "Instance JSON file")->required();
  certify_cmd->add_option("--plan", certify.plan, "Plan JSON file")->required();
  certify_cmd->add_option("--scale", certify.scale, "Override the instance cost scale");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run an experiment: grid | compare | gap | large");
  bench_cmd->require_subcommand(1);
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--problem", bench.problem, "Problem family");
    sub->add_option("--seed", bench.seed, "Instance and block seed");
    sub->add_option("--scale", bench.scale, "Integer cost scale S")->check(CLI::PositiveNumber);
    sub->add_option("--out-dir", bench.out_dir, "Directory for CSV outputs");
    sub->add_option("--pricing", bench.pricing, "most-negative | bland")
        ->check(CLI::IsMember({"most-negative", "bland"}));
  };
  auto* grid_cmd = bench_cmd->add_subcommand("grid", "(s,t) parameter study for GS-BCDNS");
  add_common(grid_cmd);
  grid_cmd->add_option("--n", bench.n, "Sample count (default 250)");
  grid_cmd->add_option("--dim", bench.dim, "Point dimension")->check(CLI::Range(1, 2));
  grid_cmd->add_option("--s-list", bench.s_list, "Comma-separated s values")->delimiter(',');
  grid_cmd->add_option("--t-list", bench.t_list, "Comma-separated t values")->delimiter(',');
  auto* compare_cmd = bench_cmd->add_subcommand("compare", "NS vs RS-BCDNS vs GS-BCDNS");
  add_common(compare_cmd);
  compare_cmd->add_option("--dim", bench.dim, "Point dimension")->check(CLI::Range(1, 2));
  compare_cmd->add_option("--n-list", bench.n_list, "Comma-separated sizes")->delimiter(',');
  compare_cmd->add_option("--methods", bench.methods, "Comma-separated exact methods")->delimiter(',');
  compare_cmd->add_option("--seeds", bench.seeds, "Comma-separated seeds")->delimiter(',');
  compare_cmd->add_option("--rs-block-size", bench.rs_block_size,
                          "Absolute RS block size (0: ceil(sN))");
  auto* gap_cmd = bench_cmd->add_subcommand("gap", "Optimality gap vs time, GS-BCDNS and Sinkhorn");
  add_common(gap_cmd);
  gap_cmd->add_option("--n", bench.n, "Sample count (default 200)");
  gap_cmd->add_option("--dim", bench.dim, "Point dimension")->check(CLI::Range(1, 2));
  gap_cmd->add_option("--eps", bench.eps, "Comma-separated Sinkhorn eps values")->delimiter(',');
  gap_cmd->add_option("--budget", bench.budget, "Sinkhorn time budget per eps, seconds");
  gap_cmd->add_option("--delta", bench.delta, "Sinkhorn objective-change tolerance");
  gap_cmd->add_option("--trace-stride", bench.trace_stride, "Sinkhorn iterations per trace row");
  gap_cmd->add_option("--check-every", bench.check_every,
                      "Sinkhorn iterations between objective-change checks");
  auto* large_cmd = bench_cmd->add_subcommand("large", "Large 1D run with barycentric snapshots");
  add_common(large_cmd);
  large_cmd->add_option("--n", bench.n, "Sample count (default 4000)");
  large_cmd->add_option("--checkpoints", bench.checkpoints, "Comma-separated epochs")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen, out);
    if (solve_cmd->parsed()) return cmd_solve(solve, out);
    if (certify_cmd->parsed()) return cmd_certify(certify, out);
    if (grid_cmd->parsed()) return bench_grid(bench, out);
    if (compare_cmd->parsed()) return bench_compare(bench, out);
    if (gap_cmd->parsed()) return bench_gap(bench, out);
    if (large_cmd->parsed()) return bench_large(bench, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::kInvalidConfig ? kExitUsage : kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace otbcd::cli
