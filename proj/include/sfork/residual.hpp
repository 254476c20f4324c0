#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sfork/distribution.hpp"
#include "sfork/evt.hpp"
#include "sfork/numeric.hpp"
#include "sfork/policy.hpp"

namespace sfork {

// Law Y of the residual straggler time after the forking point. With
// relaunching (l=0) a straggler is the minimum of r+1 fresh copies:
//   F̄_Y(y) = F̄_X(y)^{r+1}.
// Without relaunching (l=1) the surviving original is conditioned on having
// outlived the fork quantile:
//   F̄_Y(y) = (1/p) F̄_X(y)^r F̄_X(y + F_X^{-1}(1-p)).
struct ResidualModel {
  DistributionModel base;
  SingleForkPolicy policy;
  double fork_quantile = 0.0;  // F_X^{-1}(1-p), cached; NaN when p = 0
};

inline ResidualModel make_residual(const DistributionModel &base,
                                   const SingleForkPolicy &policy) {
  if (policy.l == 1 && !(policy.p > 0.0)) {
    throw std::invalid_argument(
        "make_residual: l=1 requires p > 0 (conditioning on the fork "
        "quantile)");
  }
  const double fq = policy.p > 0.0
                        ? quantile(base, 1.0 - policy.p)
                        : std::numeric_limits<double>::quiet_NaN();
  return ResidualModel{base, policy, fq};
}

// F̄_Y(y) for y >= 0, clamped to [0,1]. The l=1 case can exceed 1 for
// empirical bases with atoms at the fork quantile; continuous models hit the
// clamp only through rounding.
inline double residual_tail(const ResidualModel &res, double y) {
  if (!(y >= 0.0)) {
    throw std::invalid_argument("residual_tail: requires y >= 0");
  }
  const auto &pi = res.policy;
  const double tx = tail(res.base, y);
  double value;
  if (pi.l == 0) {
    value = std::pow(tx, pi.r + 1);
  } else {
    value = std::pow(tx, pi.r) * tail(res.base, y + res.fork_quantile) / pi.p;
  }
  return std::clamp(value, 0.0, 1.0);
}

// Domain of attraction of F_Y (follows the base family): Gumbel stays
// Gumbel; Frechet xi becomes (r+1)xi; reversed-Weibull xi becomes
// ((1-l)r+1)xi.
inline EvtFamily residual_doa(const ResidualModel &res) {
  const EvtFamily base_family = domain_of_attraction(res.base);
  const auto &pi = res.policy;
  switch (base_family.kind) {
    case EvtKind::gumbel:
      return EvtFamily::gumbel();
    case EvtKind::frechet:
      return EvtFamily::frechet((pi.r + 1) * base_family.tail_index);
    case EvtKind::reversed_weibull:
      return EvtFamily::reversed_weibull(((1 - pi.l) * pi.r + 1) *
                                         base_family.tail_index);
  }
  throw std::logic_error("residual_doa: unreachable");
}

// Normalizing constants of F_Y at straggler count `straggler_count` (= pn).
// Pareto with relaunching has the closed form a = xm (pn)^{1/((r+1)alpha)};
// without relaunching a solves
//   n^{1/alpha} xm^{r+1} = xm p^{-1/alpha} a^r + a^{r+1}
// (equivalently F̄_Y(a) = 1/(pn)), found by bisection. Shifted exponential
// is Gumbel with scale 1/((r+1)lambda) in both cases.
inline EvtConstants residual_evt_constants(const ResidualModel &res,
                                           double straggler_count) {
  if (!(straggler_count >= 2.0)) {
    throw std::invalid_argument(
        "residual_evt_constants: requires straggler count >= 2");
  }
  if (!(res.policy.p > 0.0)) {
    throw std::invalid_argument("residual_evt_constants: requires p > 0");
  }
  const auto &pi = res.policy;
  const EvtFamily family = residual_doa(res);  // rejects empirical bases
  if (const auto *par = std::get_if<Pareto>(&res.base)) {
    const double xi = family.tail_index;  // (r+1) alpha
    if (pi.l == 0) {
      return {par->xm * std::pow(straggler_count, 1.0 / xi), 0.0, family,
              straggler_count};
    }
    // Bisection bracket: the right-hand side is increasing in a and spans
    // the target inside [xm * tiny, xm * n^{1/alpha}]; the endpoints are
    // widened geometrically if rounding puts the root outside.
    const double n_total = straggler_count / pi.p;
    const double target =
        std::pow(n_total, 1.0 / par->alpha) * std::pow(par->xm, pi.r + 1);
    const auto gap = [&](double a) {
      return par->xm * std::pow(pi.p, -1.0 / par->alpha) * std::pow(a, pi.r) +
             std::pow(a, pi.r + 1) - target;
    };
    double lo = par->xm;
    double hi = par->xm * std::pow(n_total, 1.0 / par->alpha);
    while (gap(lo) > 0.0 && lo > par->xm * 1e-12) lo *= 0.5;
    while (gap(hi) < 0.0 && hi < par->xm * 1e12) hi *= 2.0;
    return {bisect_root(gap, lo, hi, 1e-10), 0.0, family, straggler_count};
  }
  const auto &se = std::get<ShiftedExponential>(res.base);
  const double scale = 1.0 / (se.lambda * (pi.r + 1));
  const double log_term = std::log(straggler_count) / (se.lambda * (pi.r + 1));
  const double location = pi.l == 0
                              ? se.delta + log_term
                              : se.delta * pi.r / (pi.r + 1.0) + log_term;
  return {scale, location, family, straggler_count};
}

// E[Y]. Closed forms where the law is again parametric; the Pareto l=1 tail
// is integrated numerically over [0, Ycut] with the polynomial remainder
//   \int_{Ycut}^\infty (1/p) xm^{(r+1)alpha} y^{-(r+1)alpha} dy
// added analytically, Ycut = 1e3 * xm * p^{-1/alpha}.
inline double residual_mean(const ResidualModel &res) {
  const auto &pi = res.policy;
  if (const auto *par = std::get_if<Pareto>(&res.base)) {
    const double xi = (pi.r + 1) * par->alpha;
    if (xi <= 1.0) {
      throw std::domain_error(
          "residual_mean: divergent mean, requires (r+1)*alpha > 1");
    }
    if (pi.l == 0) {
      return xi * par->xm / (xi - 1.0);
    }
    const double ycut =
        1e3 * par->xm * std::pow(pi.p, -1.0 / par->alpha);
    const double head = integrate_segmented(
        [&](double y) { return residual_tail(res, y); }, 0.0, ycut,
        {par->xm}, 1e-9);
    const double remainder = std::pow(par->xm, xi) / pi.p *
                             std::pow(ycut, 1.0 - xi) / (xi - 1.0);
    return head + remainder;
  }
  if (const auto *se = std::get_if<ShiftedExponential>(&res.base)) {
    if (pi.l == 0) {
      return se->delta + 1.0 / ((pi.r + 1) * se->lambda);
    }
    const double decay = std::exp(-se->lambda * se->delta);
    return (1.0 - decay) / se->lambda +
           decay / (se->lambda * (pi.r + 1));
  }
  throw std::invalid_argument(
      "residual_mean: unsupported for empirical bases; use sampled residual "
      "averages (estimator path)");
}

// One residual draw. l=0: min of r+1 fresh copies. l=1: min of the original
// conditioned above the fork quantile (inverse transform on the truncated
// tail, drawn first) and r fresh copies.
template <class Rng>
double residual_sample(const ResidualModel &res, Rng &rng) {
  const auto &pi = res.policy;
  double best;
  if (pi.l == 0) {
    best = sample(res.base, rng);
    for (int j = 0; j < pi.r; ++j) best = std::min(best, sample(res.base, rng));
    return best;
  }
  const double u = rng.uniform();
  best = quantile(res.base, 1.0 - pi.p + pi.p * u) - res.fork_quantile;
  for (int j = 0; j < pi.r; ++j) best = std::min(best, sample(res.base, rng));
  return best;
}

}  // namespace sfork
