#include "otbcd/sinkhorn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "otbcd/error.hpp"

namespace otbcd {

std::string_view to_string(SinkhornStop stop) {
  switch (stop) {
    case SinkhornStop::kScalingChange:
      return "scaling-change";
    case SinkhornStop::kObjectiveChange:
      return "objective-change";
  }
  return "unknown";
}

double gamma_from_eps(double epsilon, std::int64_t n) {
  if (n < 2) fail(ErrorCode::kInvalidConfig, "gamma = eps / (4 ln n) needs n >= 2");
  if (!(epsilon > 0.0)) fail(ErrorCode::kInvalidConfig, "epsilon must be positive");
  return epsilon / (4.0 * std::log(static_cast<double>(n)));
}

namespace {

// Splits [0, count) into contiguous chunks, one per worker. Each index is
// handled by exactly one worker, so results do not depend on `threads`.
template <typename Fn>
void parallel_for(std::int64_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count < 64) {
    for (std::int64_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::vector<std::jthread> pool;
  const auto workers = static_cast<std::int64_t>(threads);
  const auto chunk = (count + workers - 1) / workers;
  for (std::int64_t w = 0; w < workers; ++w) {
    const auto lo = w * chunk;
    const auto hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::int64_t k = lo; k < hi; ++k) fn(k);
    });
  }
}

// log sum_k exp(a_k + b_k), shifted by the max for stability.
double log_sum_exp(const double* a, const double* b, std::int64_t len) {
  double mx = -std::numeric_limits<double>::infinity();
  for (std::int64_t k = 0; k < len; ++k) mx = std::max(mx, a[k] + b[k]);
  double sum = 0.0;
  // exp underflows to exactly 0 below about -745; skipping those terms avoids
  // libm's slow underflow path without changing the sum.
  for (std::int64_t k = 0; k < len; ++k) {
    const double z = a[k] + b[k] - mx;
    if (z > -746.0) sum += std::exp(z);
  }
  return mx + std::log(sum);
}

double objective_of(const DensePlan& plan, const Instance& inst) { return true_cost(plan, inst); }

}  // namespace

DensePlan plan_from_scalings(const ScalingState& state, const Instance& inst, double gamma) {
  const auto n = inst.n();
  const auto m = inst.m();
  DensePlan plan{n, m, std::vector<double>(static_cast<std::size_t>(n * m))};
  const auto costs = inst.costs();
  for (std::int64_t i = 0; i < n; ++i) {
    const double lu = state.log_u[static_cast<std::size_t>(i)];
    for (std::int64_t j = 0; j < m; ++j) {
      const auto k = static_cast<std::size_t>(i * m + j);
      const double z = lu - costs[k] / gamma + state.log_v[static_cast<std::size_t>(j)];
      plan.x[k] = z > -746.0 ? std::exp(z) : 0.0;
    }
  }
  return plan;
}

DensePlan round_to_feasible(const DensePlan& plan, std::span<const double> p,
                            std::span<const double> q) {
  const auto n = plan.n;
  const auto m = plan.m;
  if (static_cast<std::int64_t>(p.size()) != n || static_cast<std::int64_t>(q.size()) != m) {
    fail(ErrorCode::kInvalidInput, "marginals do not match plan shape");
  }
  DensePlan out = plan;
  double total = 0.0;
  for (double x : out.x) {
    if (!(x >= 0.0)) fail(ErrorCode::kInvalidInput, "plan has a negative or NaN entry");
    total += x;
  }
  if (total <= 0.0) fail(ErrorCode::kInvalidInput, "plan has zero total mass");

  std::vector<double> rows(static_cast<std::size_t>(n), 0.0);
  std::vector<double> cols(static_cast<std::size_t>(m), 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::int64_t j = 0; j < m; ++j) r += out(i, j);
    if (r > p[static_cast<std::size_t>(i)]) {
      const double f = p[static_cast<std::size_t>(i)] / r;
      for (std::int64_t j = 0; j < m; ++j) out(i, j) *= f;
    }
  }
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < m; ++j) cols[static_cast<std::size_t>(j)] += out(i, j);
  }
  for (std::int64_t j = 0; j < m; ++j) {
    const double c = cols[static_cast<std::size_t>(j)];
    if (c > q[static_cast<std::size_t>(j)]) {
      const double f = q[static_cast<std::size_t>(j)] / c;
      for (std::int64_t i = 0; i < n; ++i) out(i, j) *= f;
    }
  }
  std::fill(cols.begin(), cols.end(), 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < m; ++j) {
      rows[static_cast<std::size_t>(i)] += out(i, j);
      cols[static_cast<std::size_t>(j)] += out(i, j);
    }
  }
  std::vector<double> err_p(static_cast<std::size_t>(n));
  std::vector<double> err_q(static_cast<std::size_t>(m));
  double norm = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    err_p[static_cast<std::size_t>(i)] =
        std::max(0.0, p[static_cast<std::size_t>(i)] - rows[static_cast<std::size_t>(i)]);
    norm += err_p[static_cast<std::size_t>(i)];
  }
  for (std::int64_t j = 0; j < m; ++j) {
    err_q[static_cast<std::size_t>(j)] =
        std::max(0.0, q[static_cast<std::size_t>(j)] - cols[static_cast<std::size_t>(j)]);
  }
  if (norm > 0.0) {
    for (std::int64_t i = 0; i < n; ++i) {
      const double a = err_p[static_cast<std::size_t>(i)] / norm;
      if (a == 0.0) continue;
      for (std::int64_t j = 0; j < m; ++j) out(i, j) += a * err_q[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

SinkhornResult sinkhorn_solve(const Instance& inst, const SinkhornConfig& config) {
  if (!(config.delta > 0.0)) fail(ErrorCode::kInvalidConfig, "delta must be positive");
  if (config.trace_stride < 1) fail(ErrorCode::kInvalidConfig, "trace stride must be >= 1");
  if (config.check_every < 1) fail(ErrorCode::kInvalidConfig, "check interval must be >= 1");
  const auto n = inst.n();
  const auto m = inst.m();
  SinkhornResult result;
  if (config.gamma > 0.0) {
    result.gamma = config.gamma;
  } else if (n < 2) {
    // gamma is irrelevant for a single row; any positive value works.
    if (!(config.epsilon > 0.0)) fail(ErrorCode::kInvalidConfig, "epsilon must be positive");
    result.gamma = config.epsilon;
  } else {
    result.gamma = gamma_from_eps(config.epsilon, n);
  }
  const double gamma = result.gamma;
  const auto p = inst.supply_fractions();
  const auto q = inst.demand_fractions();
  for (double x : p) {
    if (!(x > 0.0)) fail(ErrorCode::kInvalidInput, "Sinkhorn needs strictly positive marginals");
  }
  for (double x : q) {
    if (!(x > 0.0)) fail(ErrorCode::kInvalidInput, "Sinkhorn needs strictly positive marginals");
  }
  std::vector<double> log_p(p.size());
  std::vector<double> log_q(q.size());
  std::transform(p.begin(), p.end(), log_p.begin(), [](double x) { return std::log(x); });
  std::transform(q.begin(), q.end(), log_q.begin(), [](double x) { return std::log(x); });

  auto& log_u = result.scalings.log_u;
  auto& log_v = result.scalings.log_v;
  log_u.assign(static_cast<std::size_t>(n), 0.0);
  log_v.assign(static_cast<std::size_t>(m), 0.0);
  const auto costs = inst.costs();
  // Kernel exponent -c/gamma, row-major; computed once.
  std::vector<double> neg_c(costs.size());
  for (std::size_t k = 0; k < costs.size(); ++k) neg_c[k] = -costs[k] / gamma;
  // Column-major copy so the column pass streams memory too.
  std::vector<double> neg_ct(costs.size());
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < m; ++j) {
      neg_ct[static_cast<std::size_t>(j * n + i)] = neg_c[static_cast<std::size_t>(i * m + j)];
    }
  }

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  std::vector<double> new_u(static_cast<std::size_t>(n));
  std::vector<double> new_v(static_cast<std::size_t>(m));
  double prev_objective = std::numeric_limits<double>::quiet_NaN();
  while (true) {
    // Row update: log_u_i = log p_i - LSE_j(log_v_j - c_ij / gamma).
    parallel_for(n, config.threads, [&](std::int64_t i) {
      new_u[static_cast<std::size_t>(i)] =
          log_p[static_cast<std::size_t>(i)] - log_sum_exp(neg_c.data() + i * m, log_v.data(), m);
    });
    // Column update: log_v_j = log q_j - LSE_i(log_u_i - c_ij / gamma).
    parallel_for(m, config.threads, [&](std::int64_t j) {
      new_v[static_cast<std::size_t>(j)] =
          log_q[static_cast<std::size_t>(j)] - log_sum_exp(neg_ct.data() + j * n, new_u.data(), n);
    });
    double du = 0.0;
    double dv = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      du = std::max(du, std::abs(new_u[static_cast<std::size_t>(i)] - log_u[static_cast<std::size_t>(i)]));
    }
    for (std::int64_t j = 0; j < m; ++j) {
      dv = std::max(dv, std::abs(new_v[static_cast<std::size_t>(j)] - log_v[static_cast<std::size_t>(j)]));
    }
    log_u.swap(new_u);
    log_v.swap(new_v);
    ++result.iterations;

    const bool check = config.stop == SinkhornStop::kObjectiveChange &&
                       result.iterations % config.check_every == 0;
    const bool need_objective = check || result.iterations % config.trace_stride == 0;
    double obj = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
    if (need_objective) {
      result.rounded = round_to_feasible(plan_from_scalings(result.scalings, inst, gamma), p, q);
      obj = objective_of(result.rounded, inst);
      residual = check_feasibility(result.rounded, inst).max_violation_fraction;
    }
    if (result.iterations % config.trace_stride == 0) {
      result.trace.push_back({result.iterations, elapsed(), obj, du, dv, residual});
    }
    if (config.stop == SinkhornStop::kScalingChange) {
      if (du < config.delta && dv < config.delta) result.converged = true;
    } else if (check) {
      if (!std::isnan(prev_objective) && std::abs(obj - prev_objective) < config.delta) {
        result.converged = true;
      }
      prev_objective = obj;
    }
    if (result.converged) break;
    if (elapsed() > config.max_seconds ||
        (config.max_iterations >= 0 && result.iterations >= config.max_iterations)) {
      result.truncated = true;
      break;
    }
  }
  if (result.trace.empty() || result.trace.back().iteration != result.iterations ||
      std::isnan(result.trace.back().objective_rounded)) {
    result.rounded = round_to_feasible(plan_from_scalings(result.scalings, inst, gamma), p, q);
    const double obj = objective_of(result.rounded, inst);
    const double residual = check_feasibility(result.rounded, inst).max_violation_fraction;
    if (!result.trace.empty() && result.trace.back().iteration == result.iterations) {
      result.trace.back().objective_rounded = obj;
      result.trace.back().residual = residual;
    } else {
      result.trace.push_back({result.iterations, elapsed(), obj, 0.0, 0.0, residual});
    }
  }
  result.objective_rounded = objective_of(result.rounded, inst);
  result.seconds = elapsed();
  return result;
}

}  // namespace otbcd
