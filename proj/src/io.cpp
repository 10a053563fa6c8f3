#include "otbcd/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "otbcd/error.hpp"

namespace otbcd {

Json samples_to_json(const SamplePair& samples, std::int64_t scale) {
  auto points = [&](const std::vector<double>& flat) {
    if (samples.dim == 1) return Json(flat);
    Json arr = Json::array();
    for (std::size_t k = 0; k < flat.size(); k += static_cast<std::size_t>(samples.dim)) {
      arr.push_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(k),
                                        flat.begin() + static_cast<std::ptrdiff_t>(k) + samples.dim));
    }
    return arr;
  };
  return Json{{"schema_version", kSchemaVersion},
              {"n", samples.n()},
              {"m", samples.m()},
              {"dim", samples.dim},
              {"seed", samples.seed},
              {"kind_u", std::string(to_string(samples.kind_u))},
              {"kind_v", std::string(to_string(samples.kind_v))},
              {"u", points(samples.u)},
              {"v", points(samples.v)},
              {"scale", scale}};
}

namespace {

std::vector<double> flatten_points(const Json& arr, int dim) {
  std::vector<double> out;
  for (const auto& p : arr) {
    if (p.is_array()) {
      if (static_cast<int>(p.size()) != dim) {
        fail(ErrorCode::kInvalidInstance, "point has wrong dimension");
      }
      for (const auto& x : p) out.push_back(x.get<double>());
    } else {
      if (dim != 1) fail(ErrorCode::kInvalidInstance, "scalar point in a multi-dimensional file");
      out.push_back(p.get<double>());
    }
  }
  return out;
}

bool all_integers(const Json& arr) {
  for (const auto& x : arr) {
    if (!x.is_number_integer()) return false;
  }
  return true;
}

}  // namespace

InstanceFile instance_from_json(const Json& j, std::int64_t scale_override) {
  try {
    const std::int64_t scale =
        scale_override > 0 ? scale_override : j.value("scale", kDefaultScale);
    if (j.contains("cost")) {
      const auto n = j.at("n").get<std::int64_t>();
      const auto m = j.at("m").get<std::int64_t>();
      const auto& rows = j.at("cost");
      if (static_cast<std::int64_t>(rows.size()) != n) {
        fail(ErrorCode::kInvalidInstance, "cost has " + std::to_string(rows.size()) +
                                              " rows, expected " + std::to_string(n));
      }
      std::vector<double> cost;
      for (const auto& row : rows) {
        if (static_cast<std::int64_t>(row.size()) != m) {
          fail(ErrorCode::kInvalidInstance, "cost row has wrong length");
        }
        for (const auto& x : row) cost.push_back(x.get<double>());
      }
      const auto& pj = j.at("p");
      const auto& qj = j.at("q");
      std::vector<std::int64_t> p;
      std::vector<std::int64_t> q;
      if (all_integers(pj) && all_integers(qj)) {
        p = pj.get<std::vector<std::int64_t>>();
        q = qj.get<std::vector<std::int64_t>>();
      } else {
        const auto pd = pj.get<std::vector<double>>();
        const auto qd = qj.get<std::vector<double>>();
        std::tie(p, q) = integer_masses(pd, qd);
      }
      return {std::nullopt, Instance::from_matrix(n, m, std::move(cost), std::move(p),
                                                  std::move(q), scale)};
    }
    SamplePair s;
    s.dim = j.value("dim", 1);
    s.seed = j.value("seed", std::uint64_t{0});
    s.kind_u = parse_distribution(j.value("kind_u", std::string("uniform")));
    s.kind_v = parse_distribution(j.value("kind_v", std::string("normal")));
    s.u = flatten_points(j.at("u"), s.dim);
    s.v = flatten_points(j.at("v"), s.dim);
    if (j.contains("n") && j.at("n").get<std::int64_t>() != s.n()) {
      fail(ErrorCode::kInvalidInstance, "field n does not match the number of source points");
    }
    if (j.contains("m") && j.at("m").get<std::int64_t>() != s.m()) {
      fail(ErrorCode::kInvalidInstance, "field m does not match the number of target points");
    }
    auto inst = Instance::from_samples(s, scale);
    return {std::move(s), std::move(inst)};
  } catch (const Json::exception& e) {
    fail(ErrorCode::kInvalidInstance, std::string("malformed instance file: ") + e.what());
  }
}

InstanceFile load_instance(const std::filesystem::path& path, std::int64_t scale_override) {
  return instance_from_json(read_json(path), scale_override);
}

Json plan_to_json(const TransportPlan& plan, const Instance& inst) {
  Json arcs = Json::array();
  for (const auto& e : plan.entries) arcs.push_back({e.i, e.j, e.mass});
  return Json{{"schema_version", kSchemaVersion},
              {"n", plan.n},
              {"m", plan.m},
              {"total_mass", inst.total_mass()},
              {"arcs", arcs}};
}

Json basis_to_json(const SimplexState& state) {
  Json j = plan_to_json(state.plan(true), state.instance());
  j["basis"] = true;
  j["objective_scaled"] = state.objective();
  return j;
}

PlanFile plan_from_json(const Json& j) {
  try {
    PlanFile f;
    f.plan.n = j.at("n").get<std::int64_t>();
    f.plan.m = j.at("m").get<std::int64_t>();
    f.total_mass = j.value("total_mass", std::int64_t{0});
    for (const auto& a : j.at("arcs")) {
      f.plan.entries.push_back(
          {a.at(0).get<std::int64_t>(), a.at(1).get<std::int64_t>(), a.at(2).get<std::int64_t>()});
    }
    return f;
  } catch (const Json::exception& e) {
    fail(ErrorCode::kInvalidInput, std::string("malformed plan file: ") + e.what());
  }
}

Json to_json(const Certificate& c) {
  return Json{{"min_reduced_cost", c.min_reduced_cost}, {"arc", c.arc}, {"optimal", c.optimal()}};
}

Json to_json(const SolveReport& report, const Instance& inst) {
  return Json{{"pricing", std::string(to_string(report.pricing))},
              {"pivots", report.pivots},
              {"degenerate_pivots", report.degenerate_pivots},
              {"bland_pivots", report.bland_pivots},
              {"evaluations", report.evaluations},
              {"objective_scaled", report.objective},
              {"objective", inst.descale(report.objective)},
              {"seconds", report.seconds},
              {"optimal", report.optimal}};
}

Json to_json(const OuterReport& report, const Instance& inst) {
  Json iterations = Json::array();
  for (const auto& it : report.iterations) {
    iterations.push_back({{"k", it.k},
                          {"working_set", it.working_set},
                          {"block", it.block},
                          {"pivots", it.pivots},
                          {"evaluations", it.evaluations},
                          {"screening_rounds", it.screening_rounds},
                          {"objective_scaled", it.objective},
                          {"seconds", it.seconds}});
  }
  return Json{{"method", report.method},
              {"threshold", report.threshold},
              {"outer_iterations", report.outer_iterations},
              {"pivots", report.pivots},
              {"evaluations", report.evaluations},
              {"full_scans", report.full_scans},
              {"initial_objective_scaled", report.initial_objective},
              {"objective_scaled", report.objective},
              {"objective", inst.descale(report.objective)},
              {"seconds", report.seconds},
              {"complete", report.complete},
              {"monotonicity_violations", report.monotonicity_violations()},
              {"certificate", to_json(report.certificate)},
              {"iterations", iterations}};
}

Json to_json(const SinkhornResult& result, const Instance& inst) {
  const auto verdict = check_feasibility(result.rounded, inst);
  return Json{{"gamma", result.gamma},
              {"iterations", result.iterations},
              {"converged", result.converged},
              {"truncated", result.truncated},
              {"seconds", result.seconds},
              {"objective_rounded", result.objective_rounded},
              {"rounded_residual", verdict.max_violation_fraction},
              {"rounded_feasible", verdict.feasible}};
}

void write_json(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kInvalidInput, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kInvalidInput, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kInvalidInput, path.string() + ": " + e.what());
  }
}

struct CsvWriter::Impl {
  std::ofstream out;
  std::size_t columns = 0;
};

namespace {

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string q = "\"";
  for (char c : cell) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, const Json& config,
                     const std::vector<std::string>& header)
    : impl_(std::make_unique<Impl>()) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  impl_->out.open(path);
  if (!impl_->out) {
    fail(ErrorCode::kInvalidInput, "cannot write " + path.string());
  }
  impl_->columns = header.size();
  impl_->out << "# " << config.dump() << "\r\n";
  row(header);
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != impl_->columns) throw std::logic_error("CSV row width mismatch");
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) impl_->out << ',';
    impl_->out << quote(cells[k]);
  }
  impl_->out << "\r\n";
}

std::string csv_number(double x) {
  if (std::isnan(x)) return "";
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string csv_number(std::int64_t x) { return std::to_string(x); }

void write_iterations_csv(const std::filesystem::path& path, const Json& config,
                          const OuterReport& report) {
  CsvWriter csv(path, config, {"k", "H_k", "pivots", "evals", "objective_scaled", "time_s"});
  for (const auto& it : report.iterations) {
    csv.row({csv_number(it.k), csv_number(it.working_set), csv_number(it.pivots),
             csv_number(it.evaluations), csv_number(it.objective), csv_number(it.seconds)});
  }
}

void write_sinkhorn_trace_csv(const std::filesystem::path& path, const Json& config,
                              const SinkhornResult& result) {
  CsvWriter csv(path, config, {"iter", "time_s", "objective_rounded", "du_max", "dv_max"});
  for (const auto& pt : result.trace) {
    csv.row({csv_number(pt.iteration), csv_number(pt.seconds), csv_number(pt.objective_rounded),
             csv_number(pt.du_max), csv_number(pt.dv_max)});
  }
}

void write_grid_csv(const std::filesystem::path& path, const Json& config, const GridResult& grid) {
  CsvWriter csv(path, config,
                {"s", "t", "evals", "pivots", "outer_iterations", "runtime_s", "objective_scaled",
                 "certified"});
  for (const auto& c : grid.cells) {
    csv.row({csv_number(c.s), csv_number(c.t), csv_number(c.evaluations), csv_number(c.pivots),
             csv_number(c.outer_iterations), csv_number(c.seconds), csv_number(c.objective),
             c.certified ? "1" : "0"});
  }
}

void write_comparison_csv(const std::filesystem::path& path, const Json& config,
                          const std::vector<ComparisonRow>& rows) {
  CsvWriter csv(path, config,
                {"n", "seed", "method", "runtime_s", "evals", "pivots", "objective_scaled",
                 "objective", "speedup_vs_ns"});
  for (const auto& r : rows) {
    csv.row({csv_number(r.n), std::to_string(r.seed), std::string(to_string(r.method)),
             csv_number(r.runtime_s), csv_number(r.evaluations), csv_number(r.pivots),
             csv_number(r.objective), csv_number(r.objective_value), csv_number(r.speedup_vs_ns)});
  }
}

void write_gap_trace_csv(const std::filesystem::path& path, const Json& config,
                         const GapTrace& trace) {
  CsvWriter csv(path, config, {"time_s", "gap"});
  for (const auto& pt : trace.points) csv.row({csv_number(pt.seconds), csv_number(pt.gap)});
}

void write_barycentric_csv(const std::filesystem::path& path, const Json& config,
                           const SamplePair& samples, const ProjectionSnapshot& snapshot) {
  std::vector<std::string> header{"i"};
  for (int d = 0; d < samples.dim; ++d) header.push_back("u" + std::to_string(d));
  for (int d = 0; d < samples.dim; ++d) header.push_back("T" + std::to_string(d));
  CsvWriter csv(path, config, header);
  for (std::int64_t i = 0; i < samples.n(); ++i) {
    std::vector<std::string> cells{csv_number(i)};
    const auto ui = samples.source(i);
    for (int d = 0; d < samples.dim; ++d) cells.push_back(csv_number(ui[d]));
    for (int d = 0; d < samples.dim; ++d) {
      cells.push_back(csv_number(snapshot.projection[static_cast<std::size_t>(i * samples.dim + d)]));
    }
    csv.row(cells);
  }
}

}  // namespace otbcd
