#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "sfork/distribution.hpp"
#include "sfork/numeric.hpp"

namespace sfork {

// Extreme-value machinery: the limiting family of the sample maximum, its
// normalizing constants, and expected extremes.

enum class EvtKind { gumbel, frechet, reversed_weibull };

struct EvtFamily {
  EvtKind kind = EvtKind::gumbel;
  double tail_index = 0.0;  // xi > 0; unused for Gumbel

  static EvtFamily gumbel() { return {EvtKind::gumbel, 0.0}; }
  static EvtFamily frechet(double xi) {
    if (!(xi > 0.0)) throw std::invalid_argument("frechet: requires xi > 0");
    return {EvtKind::frechet, xi};
  }
  static EvtFamily reversed_weibull(double xi) {
    if (!(xi > 0.0)) {
      throw std::invalid_argument("reversed_weibull: requires xi > 0");
    }
    return {EvtKind::reversed_weibull, xi};
  }
};

// Normalizing constants: (max_n - location) / scale converges to the family
// law. Frechet has location 0; reversed-Weibull has location at the upper end
// point of the support.
struct EvtConstants {
  double scale = 0.0;  // a_n > 0
  double location = 0.0;
  EvtFamily family;
  double count = 0.0;  // n
};

// Mean of the limiting law: Euler-Mascheroni for Gumbel, Gamma(1 - 1/xi) for
// Frechet with xi > 1 (infinite otherwise), -Gamma(1 + 1/xi) for
// reversed-Weibull.
inline double extreme_value_mean(const EvtFamily &f) {
  switch (f.kind) {
    case EvtKind::gumbel:
      return euler_mascheroni;
    case EvtKind::frechet:
      if (f.tail_index <= 1.0) {
        throw std::domain_error(
            "extreme_value_mean: infinite expected maximum for Frechet tail "
            "index <= 1");
      }
      return std::tgamma(1.0 - 1.0 / f.tail_index);
    case EvtKind::reversed_weibull:
      return -std::tgamma(1.0 + 1.0 / f.tail_index);
  }
  throw std::logic_error("extreme_value_mean: unreachable");
}

inline double expected_extreme(const EvtConstants &c) {
  return c.scale * extreme_value_mean(c.family) + c.location;
}

// Classifies a parametric model: Pareto lies in the Frechet domain with
// xi = alpha, ShiftedExponential (exponentially decaying tail) in Gumbel.
inline EvtFamily domain_of_attraction(const DistributionModel &d) {
  if (const auto *p = std::get_if<Pareto>(&d)) {
    return EvtFamily::frechet(p->alpha);
  }
  if (std::holds_alternative<ShiftedExponential>(d)) {
    return EvtFamily::gumbel();
  }
  throw std::invalid_argument(
      "domain_of_attraction: classification unsupported for empirical "
      "models; use the estimator path");
}

// Normalizing constants for the maximum of `count` draws. count may be real
// valued (the formulas are continuous in n); count >= 2.
// Gumbel: a_n = eta(F^{-1}(1-1/n)) with eta == 1/lambda for the shifted
// exponential, b_n = F^{-1}(1-1/n). Frechet: a_n = F^{-1}(1-1/n), b_n = 0.
inline EvtConstants evt_constants(const DistributionModel &d, double count) {
  if (!(count >= 2.0)) {
    throw std::invalid_argument("evt_constants: requires count >= 2");
  }
  if (const auto *p = std::get_if<Pareto>(&d)) {
    return {p->xm * std::pow(count, 1.0 / p->alpha), 0.0,
            EvtFamily::frechet(p->alpha), count};
  }
  if (const auto *s = std::get_if<ShiftedExponential>(&d)) {
    return {1.0 / s->lambda, s->delta + std::log(count) / s->lambda,
            EvtFamily::gumbel(), count};
  }
  throw std::invalid_argument(
      "evt_constants: classification unsupported for empirical models; use "
      "the estimator path");
}

// E[max of count draws] via the extreme value limit.
inline double expected_maximum(const DistributionModel &d, double count) {
  return expected_extreme(evt_constants(d, count));
}

// Reversed-Weibull constants for a law with a finite upper end point:
// a_n = omega - F^{-1}(1 - 1/n), b_n = omega. No built-in parametric model
// lands here; it backs bounded-support laws supplied by their quantiles.
inline EvtConstants evt_constants_bounded(const EvtFamily &family,
                                          double upper_end,
                                          double quantile_near_max,
                                          double count) {
  if (family.kind != EvtKind::reversed_weibull) {
    throw std::invalid_argument(
        "evt_constants_bounded: requires a reversed-Weibull family");
  }
  if (!(count >= 2.0) || !(quantile_near_max <= upper_end)) {
    throw std::invalid_argument("evt_constants_bounded: invalid arguments");
  }
  return {upper_end - quantile_near_max, upper_end, family, count};
}

// Large-n limit of E[X_{k:n}]: the k/n quantile. Only central ranks qualify;
// k = n is the extreme order statistic and is rejected.
inline double central_order_statistic(const DistributionModel &d, long n,
                                      long k) {
  if (n < 2 || k < 1 || k > n - 1) {
    throw std::invalid_argument(
        "central_order_statistic: requires 1 <= k <= n-1");
  }
  return quantile(d, static_cast<double>(k) / static_cast<double>(n));
}

}  // namespace sfork
