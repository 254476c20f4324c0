#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "sfork/analytic.hpp"
#include "sfork/distribution.hpp"
#include "sfork/evt.hpp"
#include "sfork/numeric.hpp"

namespace sfork {

struct ForkStage {
  double p = 0.0;  // remaining-task fraction triggering this fork
  int r = 0;
  int l = 1;
};

// Fork fractions must be strictly decreasing: stage i fires when n*p_i
// unique tasks are still unfinished.
struct MultiForkPolicy {
  std::vector<ForkStage> stages;
};

inline MultiForkPolicy multi_fork(std::vector<ForkStage> stages) {
  if (stages.empty()) {
    throw std::invalid_argument("multi_fork: requires at least one stage");
  }
  double prev = 1.0;
  for (const auto &s : stages) {
    if (!(s.p > 0.0 && s.p < 1.0 && s.p < prev) || s.r < 0 ||
        (s.l != 0 && s.l != 1)) {
      throw std::invalid_argument(
          "multi_fork: requires strictly decreasing p in (0,1) and valid "
          "(r,l) per stage");
    }
    prev = s.p;
  }
  return MultiForkPolicy{std::move(stages)};
}

namespace detail {

// A stage law known through its tail function, with enough tail metadata to
// evaluate extreme-value constants and mean remainders numerically.
struct StageLaw {
  std::function<double(double)> tail_fn;  // F̄(y) on [0, inf)
  EvtKind kind = EvtKind::gumbel;
  double frechet_index = 0.0;  // xi, Frechet only
  double gumbel_rate = 0.0;    // ultimate exponential decay rate, Gumbel only
  double scale_hint = 1.0;     // typical magnitude, used to seed brackets
};

inline StageLaw wrap_base(const DistributionModel &base) {
  if (!is_parametric(base)) {
    throw std::invalid_argument(
        "multi_fork_metrics: requires a parametric base model");
  }
  StageLaw law;
  law.tail_fn = [base](double y) { return tail(base, y); };
  const EvtFamily family = domain_of_attraction(base);
  law.kind = family.kind;
  if (family.kind == EvtKind::frechet) {
    law.frechet_index = family.tail_index;
  } else {
    law.gumbel_rate = std::get<ShiftedExponential>(base).lambda;
  }
  law.scale_hint = quantile(base, 0.5);
  return law;
}

// Inverse tail by bisection: the y where F̄(y) = 1 - q.
inline double law_quantile(const StageLaw &law, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("law_quantile: requires q in (0,1)");
  }
  const double target = 1.0 - q;
  double hi = law.scale_hint;
  while (law.tail_fn(hi) > target) {
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("law_quantile: tail too heavy");
  }
  if (law.tail_fn(0.0) <= target) return 0.0;
  return bisect_root([&](double y) { return law.tail_fn(y) - target; }, 0.0,
                     hi, 1e-11);
}

// E[Z] = \int_0^inf F̄, integrated to where the tail reaches 1e-7 with the
// family-specific analytic remainder beyond.
inline double law_mean(const StageLaw &law) {
  const double ycut = law_quantile(law, 1.0 - 1e-7);
  const double head =
      integrate([&](double y) { return law.tail_fn(y); }, 0.0, ycut, 1e-9);
  const double tail_at_cut = law.tail_fn(ycut);
  double remainder;
  if (law.kind == EvtKind::frechet) {
    if (law.frechet_index <= 1.0) {
      throw std::domain_error("law_mean: divergent mean, tail index <= 1");
    }
    remainder = tail_at_cut * ycut / (law.frechet_index - 1.0);
  } else {
    remainder = tail_at_cut / law.gumbel_rate;
  }
  return head + remainder;
}

// Post-fork residual transform applied to a numeric stage law: minimum of
// r fresh copies and either another fresh copy (l=0) or the survivor
// conditioned above the fork quantile (l=1).
inline StageLaw residual_law(const StageLaw &parent, double q, int r, int l) {
  StageLaw law;
  const double fork_q = l == 1 ? law_quantile(parent, 1.0 - q) : 0.0;
  const auto parent_tail = parent.tail_fn;
  if (l == 0) {
    law.tail_fn = [parent_tail, r](double y) {
      return std::pow(parent_tail(y), r + 1);
    };
  } else {
    law.tail_fn = [parent_tail, q, r, fork_q](double y) {
      const double v =
          std::pow(parent_tail(y), r) * parent_tail(y + fork_q) / q;
      return std::clamp(v, 0.0, 1.0);
    };
  }
  law.kind = parent.kind;
  if (parent.kind == EvtKind::frechet) {
    law.frechet_index = (r + 1) * parent.frechet_index;
  } else {
    law.gumbel_rate = (r + 1) * parent.gumbel_rate;
  }
  law.scale_hint = parent.scale_hint;
  return law;
}

}  // namespace detail

// Stagewise single-fork decomposition of a multi-fork policy: stage i runs
// the n*p_{i-1} tasks left by the previous fork (p_0 = 1) with per-stage
// fraction q_i = p_i / p_{i-1}; each later stage's execution law is the
// residual transform of the previous stage's law with that stage's
// (q, r, l). Pre-fork latency/cost components of every stage are summed,
// plus the post-fork components of the final stage; cost components are
// weighted by p_{i-1} so everything stays normalized by the original n.
inline MetricsPair multi_fork_metrics(const DistributionModel &base,
                                      const MultiForkPolicy &mf, long n) {
  if (n < 2) {
    throw std::invalid_argument("multi_fork_metrics: requires n >= 2");
  }
  const auto &stages = multi_fork(mf.stages).stages;  // re-validate
  const std::size_t k = stages.size();

  detail::StageLaw law = detail::wrap_base(base);
  double latency = 0.0;
  double cost = 0.0;
  double q_prev = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double q = stages[i].p / q_prev;
    if (!(q > 0.0 && q < 1.0)) {
      throw std::invalid_argument(
          "multi_fork_metrics: per-stage fraction q_i outside (0,1)");
    }
    const double t1 = detail::law_quantile(law, 1.0 - q);
    latency += t1;
    cost += q_prev * integrate([&](double y) { return law.tail_fn(y); }, 0.0,
                               t1, 1e-9);
    const detail::StageLaw residual =
        detail::residual_law(law, q, stages[i].r, stages[i].l);
    if (i + 1 < k) {
      q_prev = stages[i].p;  // the next stage sees n*p_i remaining tasks
      law = residual;
      continue;
    }
    // Final stage: extreme value limit over the n*p_k stragglers.
    const double count = stages[i].p * static_cast<double>(n);
    if (!(count >= 2.0)) {
      throw std::invalid_argument(
          "multi_fork_metrics: final stage needs p_k * n >= 2");
    }
    double t2;
    if (residual.kind == EvtKind::frechet) {
      if (residual.frechet_index <= 1.0) {
        throw std::domain_error(
            "multi_fork_metrics: infinite latency, final tail index <= 1");
      }
      const double a = detail::law_quantile(residual, 1.0 - 1.0 / count);
      t2 = a * std::tgamma(1.0 - 1.0 / residual.frechet_index);
    } else {
      const double b = detail::law_quantile(residual, 1.0 - 1.0 / count);
      t2 = euler_mascheroni / residual.gumbel_rate + b;
    }
    latency += t2;
    cost += stages[i].p * (stages[i].r + 1) * detail::law_mean(residual);
  }
  return {latency, cost};
}

}  // namespace sfork
