#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfork/distribution.hpp"
#include "sfork/evt.hpp"
#include "sfork/numeric.hpp"
#include "sfork/policy.hpp"
#include "sfork/residual.hpp"

namespace sfork {

// (expected latency, expected machine-time normalized by job size).
struct MetricsPair {
  double latency = 0.0;
  double cost = 0.0;
};

// Pre-fork / post-fork split of both metrics. t1+t2 and c1+c2 reproduce the
// totals.
struct StageMetrics {
  double t1 = 0.0;  // time until (1-p)n tasks finish
  double t2 = 0.0;  // max residual among the pn stragglers
  double c1 = 0.0;  // machine time per task accrued before the fork
  double c2 = 0.0;  // (r+1) copies of each straggler after the fork

  MetricsPair totals() const { return {t1 + t2, c1 + c2}; }
};

// Large-n latency/cost decomposition of a single-fork policy:
//   t1 = F_X^{-1}(1-p)
//   t2 = E[max of pn residual draws]        (extreme value limit)
//   c1 = \int_0^{1-p} F_X^{-1}(h) dh + p F_X^{-1}(1-p)
//   c2 = (r+1) p E[Y]
// The no-replication baseline (p=0, or r=0 with the original kept) is the
// plain maximum order statistic with cost E[X]; the staged route is not used
// there since the finite-count extreme value constants of X and Y differ by
// a constant for heavy tails.
//
// pn enters the extreme value constants as a real-valued asymptotic
// parameter; rounding to integer counts happens only where actual draws are
// made (simulator, estimator).
inline StageMetrics stage_metrics(const DistributionModel &base,
                                  const SingleForkPolicy &policy, long n) {
  if (n < 2) throw std::invalid_argument("stage_metrics: requires n >= 2");
  if (!is_parametric(base)) {
    throw std::invalid_argument(
        "stage_metrics: analytic evaluation needs a parametric model; use "
        "the estimator path for empirical inputs");
  }
  if (is_baseline(policy)) {
    return {0.0, expected_maximum(base, static_cast<double>(n)),
            mean_of(base), 0.0};
  }
  const double pn = policy.p * static_cast<double>(n);
  if (!(pn >= 2.0)) {
    throw std::invalid_argument("stage_metrics: requires p*n >= 2");
  }
  const ResidualModel res = make_residual(base, policy);
  const double t1 = res.fork_quantile;
  const EvtConstants ec = residual_evt_constants(res, pn);
  const double t2 = expected_extreme(ec);  // rejects (r+1)*xi <= 1
  const double support_floor = lower_support(base);  // quantile limit at h=0
  const double c1 =
      integrate(
          [&](double h) {
            return h > 0.0 ? quantile(base, h) : support_floor;
          },
          0.0, 1.0 - policy.p, 1e-9) +
      policy.p * t1;
  const double c2 = (policy.r + 1) * policy.p * residual_mean(res);
  return {t1, t2, c1, c2};
}

inline MetricsPair metrics_general(const DistributionModel &base,
                                   const SingleForkPolicy &policy, long n) {
  return stage_metrics(base, policy, n).totals();
}

// Pareto closed forms:
//   E[T] = xm p^{-1/alpha} + Gamma(1 - 1/((r+1)alpha)) a_pn
//   E[C] = xm alpha/(alpha-1) - xm p^{1-1/alpha}/(alpha-1) + (r+1) p E[Y]
// with a_pn and E[Y] depending on the relaunch flag.
inline MetricsPair metrics_pareto(double alpha, double xm,
                                  const SingleForkPolicy &policy, long n) {
  if (!(alpha > 1.0)) {
    throw std::invalid_argument("metrics_pareto: requires alpha > 1");
  }
  const DistributionModel base = pareto(alpha, xm);
  if (is_baseline(policy)) {
    return {expected_maximum(base, static_cast<double>(n)), mean_of(base)};
  }
  if (!(policy.p > 0.0 && policy.p < 1.0)) {
    throw std::invalid_argument("metrics_pareto: requires p in (0,1)");
  }
  const double xi = (policy.r + 1) * alpha;
  if (xi <= 1.0) {
    throw std::domain_error(
        "metrics_pareto: infinite latency, requires (r+1)*alpha > 1");
  }
  const ResidualModel res = make_residual(base, policy);
  const double a_pn =
      residual_evt_constants(res, policy.p * static_cast<double>(n)).scale;
  const double latency = xm * std::pow(policy.p, -1.0 / alpha) +
                         std::tgamma(1.0 - 1.0 / xi) * a_pn;
  const double cost = xm * alpha / (alpha - 1.0) -
                      xm * std::pow(policy.p, 1.0 - 1.0 / alpha) / (alpha - 1.0) +
                      (policy.r + 1) * policy.p * residual_mean(res);
  return {latency, cost};
}

// Shifted-exponential closed forms:
//   E[T] = ((2r+l)/(r+l)) Delta + (ln n - r ln p + gamma_EM) / ((r+1) lambda)
//   E[C] = Delta + 1/lambda + p (r+1) Delta                     (l = 0)
//   E[C] = Delta + 1/lambda + p r (1 - e^{-lambda Delta})/lambda (l = 1)
// The cost terms follow from integrating the quantile over [0, 1-p]; both
// reduce to Delta + 1/lambda as p -> 0, and at Delta = 0 the cost is
// independent of p and r.
inline MetricsPair metrics_sexp(double delta, double lambda,
                                const SingleForkPolicy &policy, long n) {
  const DistributionModel base = shifted_exponential(delta, lambda);
  if (is_baseline(policy)) {
    return {expected_maximum(base, static_cast<double>(n)), mean_of(base)};
  }
  if (policy.r + policy.l == 0) {
    throw std::invalid_argument(
        "metrics_sexp: latency prefactor undefined at r=0, l=0; use "
        "metrics_general");
  }
  if (!(policy.p > 0.0 && policy.p < 1.0)) {
    throw std::invalid_argument("metrics_sexp: requires p in (0,1)");
  }
  const double r = policy.r;
  const double l = policy.l;
  const double latency =
      (2.0 * r + l) / (r + l) * delta +
      (std::log(static_cast<double>(n)) - r * std::log(policy.p) +
       euler_mascheroni) /
          ((r + 1.0) * lambda);
  const double cost =
      policy.l == 0
          ? delta + 1.0 / lambda + policy.p * (r + 1.0) * delta
          : delta + 1.0 / lambda +
                policy.p * r * (1.0 - std::exp(-lambda * delta)) / lambda;
  return {latency, cost};
}

// Relaunching gives the lower Pareto latency exactly when
// p^{1/alpha} + (np)^{-1/((r+1)alpha)} <= 1.
inline bool pareto_relaunch_preferred(double p, int r, long n, double alpha) {
  if (!(p > 0.0 && p < 1.0) || n < 2) {
    throw std::invalid_argument(
        "pareto_relaunch_preferred: requires p in (0,1) and n >= 2");
  }
  return std::pow(p, 1.0 / alpha) +
             std::pow(static_cast<double>(n) * p,
                      -1.0 / ((r + 1) * alpha)) <=
         1.0;
}

// Largest p* such that relaunching policies with p < p* are dominated: both
// dE[T]/dp and dE[C]/dp are negative there, so increasing p improves latency
// and cost simultaneously. Scans a 1e-4 grid of central differences of the
// Pareto closed forms; returns 0 when no positive-to-nonpositive sign change
// of the derivative product exists.
inline double pareto_suboptimal_boundary(int r, double alpha, long n) {
  const double xm = 1.0;  // both derivatives scale linearly in xm
  const double step = 1e-4;
  const SingleForkPolicy probe{0.0, r, 0};
  const auto latency_cost = [&](double p) {
    SingleForkPolicy pi = probe;
    pi.p = p;
    return metrics_pareto(alpha, xm, pi, n);
  };
  const auto derivative_product = [&](double p) {
    const MetricsPair above = latency_cost(p + step);
    const MetricsPair below = latency_cost(p - step);
    const double dt = (above.latency - below.latency) / (2.0 * step);
    const double dc = (above.cost - below.cost) / (2.0 * step);
    return dt * dc;
  };
  // start where the extreme-value count p*n is meaningful
  const double p_start =
      std::max(2.0 * step, 2.0 / static_cast<double>(n) + 2.0 * step);
  bool seen_positive = false;
  for (double p = p_start; p < 1.0 - 2.0 * step; p += step) {
    const double product = derivative_product(p);
    if (!seen_positive) {
      if (product > 0.0) {
        seen_positive = true;
      } else {
        return 0.0;  // dominated range must start at p = 0
      }
    } else if (product <= 0.0) {
      return p;
    }
  }
  return 0.0;
}

// Relaunching costs strictly more for the shifted exponential exactly when
// g(beta) = beta r + beta - r + r e^{-beta} is positive at beta =
// lambda*Delta (latency is always weakly worse under relaunching for this
// family).
inline bool sexp_relaunch_strictly_worse(double delta, double lambda, int r) {
  if (!(delta >= 0.0) || !(lambda > 0.0) || r < 1) {
    throw std::invalid_argument(
        "sexp_relaunch_strictly_worse: requires delta >= 0, lambda > 0, r >= "
        "1");
  }
  const double beta = lambda * delta;
  return beta * r + beta - r + r * std::exp(-beta) > 0.0;
}

struct TradeoffPoint {
  double p = 0.0;
  std::optional<MetricsPair> metrics;
  std::string error;  // set when evaluation failed at this grid point
};

// metrics_general along a p grid; per-point failures are recorded and the
// sweep continues.
inline std::vector<TradeoffPoint> tradeoff_curve(const DistributionModel &base,
                                                 int r, int l, long n,
                                                 const std::vector<double> &p_grid) {
  std::vector<TradeoffPoint> curve;
  curve.reserve(p_grid.size());
  for (double p : p_grid) {
    TradeoffPoint point;
    point.p = p;
    try {
      if (!(p >= 0.0 && p < 1.0)) {
        throw std::invalid_argument("tradeoff_curve: p outside [0,1)");
      }
      point.metrics = metrics_general(base, SingleForkPolicy{p, r, l}, n);
    } catch (const std::exception &e) {
      point.error = e.what();
    }
    curve.push_back(std::move(point));
  }
  return curve;
}

}  // namespace sfork
