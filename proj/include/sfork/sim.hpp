#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sfork/analytic.hpp"
#include "sfork/distribution.hpp"
#include "sfork/policy.hpp"
#include "sfork/random.hpp"

namespace sfork {

// One simulated job: per-task finish times, the job latency T = max_i T_i,
// the normalized machine-time C, and the fork time (absent for baseline
// runs).
struct JobRealization {
  std::vector<double> task_finish;
  double latency = 0.0;
  double cost = 0.0;
  std::optional<double> fork_time;
};

// Static launch plan: replica j of task i starts at launch_times[i][j].
struct LaunchSchedule {
  std::vector<std::vector<double>> launch_times;
};

// Evaluates a fixed schedule against realized execution times:
//   T_i = min_j (t_{i,j} + X_{i,j}),  C = (1/n) sum_{i,j} max(0, T_i - t_{i,j}).
// Replicas launched after their task already finished contribute nothing.
inline JobRealization evaluate_static(
    const LaunchSchedule &schedule,
    const std::vector<std::vector<double>> &execution_times) {
  const std::size_t n = schedule.launch_times.size();
  if (n == 0 || execution_times.size() != n) {
    throw std::invalid_argument(
        "evaluate_static: schedule/execution dimension mismatch");
  }
  JobRealization job;
  job.task_finish.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto &launches = schedule.launch_times[i];
    const auto &runs = execution_times[i];
    if (launches.empty() || runs.size() != launches.size()) {
      throw std::invalid_argument(
          "evaluate_static: schedule/execution dimension mismatch");
    }
    double finish = launches[0] + runs[0];
    for (std::size_t j = 1; j < launches.size(); ++j) {
      finish = std::min(finish, launches[j] + runs[j]);
    }
    job.task_finish[i] = finish;
  }
  double cost_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (double t : schedule.launch_times[i]) {
      cost_sum += std::max(0.0, job.task_finish[i] - t);
    }
  }
  job.latency = *std::max_element(job.task_finish.begin(), job.task_finish.end());
  job.cost = cost_sum / static_cast<double>(n);
  return job;
}

// Exact finite-n dynamics of one single-fork job. n draws of X are taken in
// index order; the fork happens at the ceil((1-p)n)-th finish (ties broken
// by draw index) and the floor(pn) stragglers each get their replicas, the
// original continuing with its realized residual X_i - T1 when l=1. Replicas
// die instantly once the earliest copy of their task finishes, so every
// post-fork copy runs exactly the task residual.
template <class Rng>
JobRealization simulate_job(const DistributionModel &base,
                            const SingleForkPolicy &policy, long n, Rng &rng) {
  if (n < 1) throw std::invalid_argument("simulate_job: requires n >= 1");
  std::vector<double> draws(static_cast<std::size_t>(n));
  for (auto &x : draws) x = sample(base, rng);

  JobRealization job;
  if (is_baseline(policy)) {
    job.task_finish = draws;
    job.latency = *std::max_element(draws.begin(), draws.end());
    job.cost = std::accumulate(draws.begin(), draws.end(), 0.0) /
               static_cast<double>(n);
    return job;
  }

  const auto finished_count = static_cast<std::size_t>(
      std::ceil((1.0 - policy.p) * static_cast<double>(n)));
  const auto straggler_count = static_cast<std::size_t>(n) - finished_count;

  std::vector<std::size_t> order(draws.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return draws[a] != draws[b] ? draws[a] < draws[b] : a < b;
  });

  const double fork_time =
      finished_count > 0 ? draws[order[finished_count - 1]] : 0.0;
  job.fork_time = fork_time;
  job.task_finish.resize(draws.size());

  double pre_fork_sum = 0.0;  // ascending, matching the estimator's summation
  for (std::size_t k = 0; k < finished_count; ++k) {
    const std::size_t i = order[k];
    job.task_finish[i] = draws[i];
    pre_fork_sum += draws[i];
  }

  // Stragglers in draw-index order so the replica draw sequence is stable.
  std::vector<std::size_t> stragglers(order.begin() + finished_count,
                                      order.end());
  std::sort(stragglers.begin(), stragglers.end());

  for (std::size_t i : stragglers) {
    double residual;
    if (policy.l == 1) {
      residual = draws[i] - fork_time;
      for (int j = 0; j < policy.r; ++j) {
        residual = std::min(residual, sample(base, rng));
      }
    } else {
      residual = sample(base, rng);
      for (int j = 0; j < policy.r; ++j) {
        residual = std::min(residual, sample(base, rng));
      }
    }
    job.task_finish[i] = fork_time + residual;
  }

  // Cost from the recorded finish events, so the realization reconstructs
  // to the same machine busy totals bit for bit.
  double residual_sum = 0.0;
  for (std::size_t i : stragglers) residual_sum += job.task_finish[i] - fork_time;
  job.latency =
      *std::max_element(job.task_finish.begin(), job.task_finish.end());
  job.cost = (pre_fork_sum + static_cast<double>(straggler_count) * fork_time +
              (policy.r + 1) * residual_sum) /
             static_cast<double>(n);
  return job;
}

struct MonteCarloResult {
  MetricsPair mean;
  std::optional<MetricsPair> standard_error;  // absent for a single trial
  long trials = 0;
};

// Sample means and standard errors of (T, C) over independent realizations.
// Each trial runs on its own split stream, so results do not depend on
// evaluation order.
inline MonteCarloResult monte_carlo(const DistributionModel &base,
                                    const SingleForkPolicy &policy, long n,
                                    long trials, const SplitRng &rng) {
  if (trials < 1) throw std::invalid_argument("monte_carlo: requires trials >= 1");
  double mean_t = 0.0, mean_c = 0.0, m2_t = 0.0, m2_c = 0.0;
  for (long t = 0; t < trials; ++t) {
    SplitRng trial_rng = rng.split(static_cast<std::uint64_t>(t));
    const JobRealization job = simulate_job(base, policy, n, trial_rng);
    const double k = static_cast<double>(t + 1);
    const double dt = job.latency - mean_t;
    mean_t += dt / k;
    m2_t += dt * (job.latency - mean_t);
    const double dc = job.cost - mean_c;
    mean_c += dc / k;
    m2_c += dc * (job.cost - mean_c);
  }
  MonteCarloResult result;
  result.mean = {mean_t, mean_c};
  result.trials = trials;
  if (trials > 1) {
    const double m = static_cast<double>(trials);
    result.standard_error = MetricsPair{
        std::sqrt(m2_t / (m - 1.0) / m), std::sqrt(m2_c / (m - 1.0) / m)};
  }
  return result;
}

}  // namespace sfork
