#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sfork/distribution.hpp"
#include "sfork/policy.hpp"
#include "sfork/random.hpp"
#include "sfork/residual.hpp"

namespace sfork {

struct EstimateConfig {
  long n = 2;             // job size, >= 2
  long repetitions = 1;   // m >= 1
  std::uint64_t seed = 0;
};

struct EstimatedMetrics {
  double latency = 0.0;  // T~
  double cost = 0.0;     // C~
  std::optional<double> latency_se;  // absent when m = 1
  std::optional<double> cost_se;
};

namespace detail {

struct RunningMoments {
  double mean = 0.0;
  double m2 = 0.0;
  long count = 0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }
  std::optional<double> standard_error() const {
    if (count < 2) return std::nullopt;
    const double m = static_cast<double>(count);
    return std::sqrt(m2 / (m - 1.0) / m);
  }
};

}  // namespace detail

// Sampling-based estimate of expected latency and cost. Per repetition:
// draw n samples of X; T1 = ceil(n(1-p))-th smallest, C1 = (sum of the
// ceil(n(1-p)) smallest)/n; then floor(np) residual draws with maximum Ymax
// and mean Yavg give
//   T~ = T1 + Ymax,   C~ = C1 + p T1 + (r+1) p Yavg.
// Outputs are means over the m repetitions (repetition i runs on split
// stream i of the seed). p = 0 falls back to the max/mean of n draws.
template <class RngLike>
EstimatedMetrics estimate_metrics_with(const DistributionModel &base,
                                       const SingleForkPolicy &policy, long n,
                                       long repetitions, const RngLike &rng) {
  if (n < 2) throw std::invalid_argument("estimate_metrics: requires n >= 2");
  if (repetitions < 1) {
    throw std::invalid_argument("estimate_metrics: requires m >= 1");
  }
  detail::RunningMoments latency_stats, cost_stats;
  std::vector<double> draws(static_cast<std::size_t>(n));
  const bool baseline = policy.p == 0.0;
  std::optional<ResidualModel> res;
  if (!baseline) res = make_residual(base, policy);

  for (long i = 0; i < repetitions; ++i) {
    auto rep_rng = rng.split(static_cast<std::uint64_t>(i));
    for (auto &x : draws) x = sample(base, rep_rng);
    std::sort(draws.begin(), draws.end());
    if (baseline) {
      latency_stats.add(draws.back());
      cost_stats.add(std::accumulate(draws.begin(), draws.end(), 0.0) /
                     static_cast<double>(n));
      continue;
    }
    const auto finished_count = static_cast<std::size_t>(
        std::ceil((1.0 - policy.p) * static_cast<double>(n)));
    const auto straggler_count = static_cast<std::size_t>(n) - finished_count;
    const double t1 = draws[finished_count - 1];
    double c1 = 0.0;  // ascending partial sum, matching the simulator
    for (std::size_t k = 0; k < finished_count; ++k) c1 += draws[k];
    c1 /= static_cast<double>(n);

    double y_max = 0.0, y_sum = 0.0;
    for (std::size_t k = 0; k < straggler_count; ++k) {
      const double y = residual_sample(*res, rep_rng);
      y_max = std::max(y_max, y);
      y_sum += y;
    }
    const double y_avg =
        straggler_count > 0 ? y_sum / static_cast<double>(straggler_count) : 0.0;
    latency_stats.add(t1 + y_max);
    cost_stats.add(c1 + policy.p * t1 + (policy.r + 1) * policy.p * y_avg);
  }

  EstimatedMetrics out;
  out.latency = latency_stats.mean;
  out.cost = cost_stats.mean;
  out.latency_se = latency_stats.standard_error();
  out.cost_se = cost_stats.standard_error();
  return out;
}

inline EstimatedMetrics estimate_metrics(const DistributionModel &base,
                                         const SingleForkPolicy &policy,
                                         const EstimateConfig &cfg) {
  return estimate_metrics_with(base, policy, cfg.n, cfg.repetitions,
                               SplitRng(cfg.seed));
}

}  // namespace sfork
