#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sfork/distribution.hpp"
#include "sfork/estimate.hpp"
#include "sfork/policy.hpp"
#include "sfork/random.hpp"

namespace sfork {

// Heuristic search for the single-fork policy minimizing J = T~ + mu * C~.
struct SearchConfig {
  double mu = 1.0;        // weight on cost
  double delta_p = 0.002; // gradient probe and step scale
  long iterations = 25;   // outer loop count k
  long n = 2;             // job size for the estimates
  long repetitions = 500; // m per estimate
  int r_max = 10;         // inner-loop replica cap
  double p_min = 0.0;     // 0 means 1/n
  double p_max = 0.5;
  // Follow the pseudocode literally: p <- p - delta_p * dJ with the raw
  // finite difference dJ. The normalized mode caps the move at one delta_p
  // per iteration, which tames huge objective scales.
  bool normalized_step = false;
  // Reuse one stream for every J evaluation instead of a fresh split stream
  // per evaluation (common random numbers; reduces gradient noise).
  bool common_random_numbers = false;
};

inline double objective(const EstimatedMetrics &metrics, double mu) {
  if (!(mu >= 0.0)) throw std::invalid_argument("objective: requires mu >= 0");
  return metrics.latency + mu * metrics.cost;
}

struct EvaluatedPolicy {
  SingleForkPolicy policy;
  EstimatedMetrics metrics;
  double j = 0.0;
};

struct SearchStep {
  long iteration = 0;
  SingleForkPolicy policy;
  double j = 0.0;
};

struct SearchResult {
  EvaluatedPolicy best;          // lowest J ever evaluated
  EvaluatedPolicy baseline;      // no-replication reference, same seed stream
  std::vector<SearchStep> trajectory;
  bool replica_cap_hit = false;
};

// Alternates an inner replica search with a finite-difference step on p:
// starting from (p = 1/n, r = 0, l = 0), the inner loop keeps adopting
// whichever of (r+1, l=0) / (r+1, l=1) has the lower estimated J while that
// strictly improves; then p moves by -delta_p * [J(p+delta_p) - J(p)],
// clamped to [p_min, p_max]. Candidates with r = 0 are the no-op baseline
// regardless of p and are evaluated as such. The returned policy is the
// best candidate ever evaluated, not the final iterate.
inline SearchResult best_single_fork(const DistributionModel &base,
                                     const SearchConfig &cfg,
                                     const SplitRng &rng) {
  if (cfg.iterations < 1 || cfg.repetitions < 1 || cfg.n < 2 ||
      !(cfg.delta_p > 0.0) || cfg.r_max < 1) {
    throw std::invalid_argument("best_single_fork: invalid search config");
  }
  const double p_floor =
      cfg.p_min > 0.0 ? cfg.p_min : 1.0 / static_cast<double>(cfg.n);
  const double p_ceil = std::min(cfg.p_max, 1.0 - p_floor);

  std::uint64_t eval_counter = 0;
  const auto evaluate = [&](SingleForkPolicy pi) {
    if (pi.r == 0) pi = SingleForkPolicy{0.0, 0, 1};  // no-op baseline
    const auto stream = cfg.common_random_numbers ? 0 : eval_counter++;
    const EstimatedMetrics metrics = estimate_metrics_with(
        base, pi, cfg.n, cfg.repetitions, rng.split(stream));
    return EvaluatedPolicy{pi, metrics, objective(metrics, cfg.mu)};
  };

  SearchResult result;
  result.baseline = evaluate(SingleForkPolicy{0.0, 0, 1});
  result.best = result.baseline;
  const auto consider = [&](const EvaluatedPolicy &cand) {
    if (cand.j < result.best.j) result.best = cand;
  };

  double p = p_floor;
  int r_star = 0;
  int l_star = 0;
  EvaluatedPolicy current = evaluate(SingleForkPolicy{p, r_star, l_star});
  consider(current);

  for (long iter = 0; iter < cfg.iterations; ++iter) {
    // Inner loop: grow r while the better of the two relaunch flags improves J.
    while (true) {
      if (r_star + 1 > cfg.r_max) {
        result.replica_cap_hit = true;
        break;
      }
      const EvaluatedPolicy with_relaunch =
          evaluate(SingleForkPolicy{p, r_star + 1, 0});
      const EvaluatedPolicy keep_original =
          evaluate(SingleForkPolicy{p, r_star + 1, 1});
      consider(with_relaunch);
      consider(keep_original);
      const EvaluatedPolicy &proposal =
          keep_original.j < with_relaunch.j ? keep_original : with_relaunch;
      if (proposal.j - current.j < 0.0) {
        r_star += 1;
        l_star = proposal.policy.l;
        current = proposal;
      } else {
        break;
      }
    }

    // Gradient step on p.
    const double probe_p = std::min(p + cfg.delta_p, 1.0 - p_floor);
    const EvaluatedPolicy probe =
        evaluate(SingleForkPolicy{probe_p, r_star, l_star});
    consider(probe);
    const double dj = probe.j - current.j;
    const double move = cfg.normalized_step
                            ? cfg.delta_p * std::clamp(dj / cfg.delta_p, -1.0, 1.0)
                            : cfg.delta_p * dj;
    p = std::clamp(p - move, p_floor, p_ceil);
    current = evaluate(SingleForkPolicy{p, r_star, l_star});
    consider(current);
    result.trajectory.push_back(
        {iter + 1, SingleForkPolicy{p, r_star, l_star}, current.j});
  }
  return result;
}

struct ReferencePoint {
  double p = 0.0;
  EstimatedMetrics metrics;
};

// Estimated trade-off of the MapReduce backup-task setting (r=1, l=1) along
// a p grid, for comparison against searched policies. p = 0 entries are the
// baseline estimate.
inline std::vector<ReferencePoint> mapreduce_reference_curve(
    const DistributionModel &base, long n, const std::vector<double> &p_grid,
    long repetitions, const SplitRng &rng) {
  std::vector<ReferencePoint> curve;
  curve.reserve(p_grid.size());
  std::uint64_t stream = 0;
  for (double p : p_grid) {
    const SingleForkPolicy pi{p, 1, 1};
    curve.push_back({p, estimate_metrics_with(base, pi, n, repetitions,
                                              rng.split(stream++))});
  }
  return curve;
}

}  // namespace sfork
