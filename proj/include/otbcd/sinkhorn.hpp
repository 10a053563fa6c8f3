#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "otbcd/instance.hpp"

namespace otbcd {

enum class SinkhornStop {
  kScalingChange,    // max-norm change of both log-scaling vectors < delta
  kObjectiveChange,  // |f(round(X_t)) - f(round(X_{t-K}))| < delta, K = check_every
};

std::string_view to_string(SinkhornStop stop);

struct SinkhornConfig {
  double epsilon = 1e-2;
  double gamma = 0.0;  // 0 derives gamma = epsilon / (4 ln n)
  double delta = 1e-6;
  double max_seconds = 2000.0;
  std::int64_t max_iterations = -1;  // < 0: uncapped
  std::int64_t trace_stride = 1;
  // Iterations between objective comparisons for the objective-change stop.
  // A single sweep can leave the rounded objective almost flat long before
  // the scalings settle at small gamma.
  std::int64_t check_every = 1000;
  SinkhornStop stop = SinkhornStop::kObjectiveChange;
  unsigned threads = 1;
};

/// Log-domain scalings: X = diag(exp(log_u)) exp(-C / gamma) diag(exp(log_v)).
struct ScalingState {
  std::vector<double> log_u;
  std::vector<double> log_v;
};

struct SinkhornTracePoint {
  std::int64_t iteration = 0;
  double seconds = 0.0;
  double objective_rounded = 0.0;
  double du_max = 0.0;
  double dv_max = 0.0;
  double residual = 0.0;  // marginal residual of the rounded iterate
};

struct SinkhornResult {
  ScalingState scalings;
  double gamma = 0.0;
  std::int64_t iterations = 0;
  bool converged = false;
  bool truncated = false;  // stopped by the time or iteration budget
  double seconds = 0.0;
  DensePlan rounded;       // final iterate after rounding
  double objective_rounded = 0.0;
  std::vector<SinkhornTracePoint> trace;
};

/// gamma = epsilon / (4 ln n). Throws InvalidConfig for n < 2 or epsilon <= 0.
double gamma_from_eps(double epsilon, std::int64_t n);

SinkhornResult sinkhorn_solve(const Instance& inst, const SinkhornConfig& config);

/// x_ij = exp(log_u_i - c_ij / gamma + log_v_j), with the unscaled costs.
DensePlan plan_from_scalings(const ScalingState& state, const Instance& inst, double gamma);

/// Rounds a positive near-feasible plan onto the marginals: shrink rows to at
/// most p, then columns to at most q, then add err_p err_q^T / |err_p|_1.
/// Throws InvalidInput on a plan of zero total mass.
DensePlan round_to_feasible(const DensePlan& plan, std::span<const double> p,
                            std::span<const double> q);

}  // namespace otbcd
