#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "otbcd/bcdns.hpp"
#include "otbcd/bench.hpp"
#include "otbcd/instance.hpp"
#include "otbcd/network_simplex.hpp"
#include "otbcd/sinkhorn.hpp"

namespace otbcd {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct InstanceFile {
  std::optional<SamplePair> samples;  // absent for raw-matrix files
  Instance instance;
};

/// Sample-based instance file; costs are rebuilt from the points on load.
Json samples_to_json(const SamplePair& samples, std::int64_t scale);
/// Parses either the sample form or the raw {n, m, cost, p, q} form.
/// `scale_override` > 0 replaces the file's scale.
InstanceFile instance_from_json(const Json& j, std::int64_t scale_override = 0);
InstanceFile load_instance(const std::filesystem::path& path, std::int64_t scale_override = 0);

/// Sparse arc list; `state` variants also list zero-flow basic arcs.
Json plan_to_json(const TransportPlan& plan, const Instance& inst);
Json basis_to_json(const SimplexState& state);
struct PlanFile {
  TransportPlan plan;
  std::int64_t total_mass = 0;
};
PlanFile plan_from_json(const Json& j);

Json to_json(const SolveReport& report, const Instance& inst);
Json to_json(const OuterReport& report, const Instance& inst);
Json to_json(const Certificate& c);
Json to_json(const SinkhornResult& result, const Instance& inst);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

/// RFC-4180 style CSV with a header row. The first line is a `# ` comment
/// carrying the resolved run config as compact JSON.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const Json& config,
            const std::vector<std::string>& header);
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;
  ~CsvWriter();

  void row(const std::vector<std::string>& cells);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::string csv_number(double x);
std::string csv_number(std::int64_t x);

void write_iterations_csv(const std::filesystem::path& path, const Json& config,
                          const OuterReport& report);
void write_sinkhorn_trace_csv(const std::filesystem::path& path, const Json& config,
                              const SinkhornResult& result);
void write_grid_csv(const std::filesystem::path& path, const Json& config, const GridResult& grid);
void write_comparison_csv(const std::filesystem::path& path, const Json& config,
                          const std::vector<ComparisonRow>& rows);
void write_gap_trace_csv(const std::filesystem::path& path, const Json& config,
                         const GapTrace& trace);
void write_barycentric_csv(const std::filesystem::path& path, const Json& config,
                           const SamplePair& samples, const ProjectionSnapshot& snapshot);

}  // namespace otbcd
