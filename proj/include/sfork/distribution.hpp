#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace sfork {

// Task execution-time models. Pareto is heavy-tailed (polynomial tail),
// ShiftedExponential has an exponential tail with a constant startup offset,
// Empirical is backed by observed durations.

struct Pareto {
  double alpha;  // shape > 0
  double xm;     // scale > 0, lower support point
};

struct ShiftedExponential {
  double delta;   // offset >= 0
  double lambda;  // rate > 0
};

struct Empirical {
  std::vector<double> samples;  // sorted ascending, finite, >= 0, size >= 2
};

using DistributionModel = std::variant<Pareto, ShiftedExponential, Empirical>;

inline DistributionModel pareto(double alpha, double xm) {
  if (!(alpha > 0.0) || !(xm > 0.0)) {
    throw std::invalid_argument("pareto: requires alpha > 0 and xm > 0");
  }
  return Pareto{alpha, xm};
}

inline DistributionModel shifted_exponential(double delta, double lambda) {
  if (!(lambda > 0.0) || !(delta >= 0.0)) {
    throw std::invalid_argument(
        "shifted_exponential: requires lambda > 0 and delta >= 0");
  }
  return ShiftedExponential{delta, lambda};
}

inline DistributionModel empirical(std::vector<double> samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("empirical: requires at least 2 samples");
  }
  for (double s : samples) {
    if (!std::isfinite(s) || s < 0.0) {
      throw std::invalid_argument("empirical: samples must be finite and >= 0");
    }
  }
  std::sort(samples.begin(), samples.end());
  return Empirical{std::move(samples)};
}

inline bool is_parametric(const DistributionModel &d) {
  return !std::holds_alternative<Empirical>(d);
}

// F_X(x). Empirical uses the step ECDF: value k/n at the k-th sorted sample.
inline double cdf(const DistributionModel &d, double x) {
  if (const auto *p = std::get_if<Pareto>(&d)) {
    if (x < p->xm) return 0.0;
    return 1.0 - std::pow(p->xm / x, p->alpha);
  }
  if (const auto *s = std::get_if<ShiftedExponential>(&d)) {
    if (x < s->delta) return 0.0;
    return 1.0 - std::exp(-s->lambda * (x - s->delta));
  }
  const auto &v = std::get<Empirical>(d).samples;
  const auto it = std::upper_bound(v.begin(), v.end(), x);
  return static_cast<double>(it - v.begin()) / static_cast<double>(v.size());
}

// Tail F̄_X(x) = 1 - F_X(x), exactly complementary to cdf.
inline double tail(const DistributionModel &d, double x) {
  return 1.0 - cdf(d, x);
}

// Generalized inverse CDF, q in (0,1). The Empirical inverse interpolates
// linearly between adjacent order statistics so it is continuous and
// samplable; the step ECDF is kept for cdf/tail.
inline double quantile(const DistributionModel &d, double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("quantile: requires q in (0,1)");
  }
  if (const auto *p = std::get_if<Pareto>(&d)) {
    return p->xm * std::pow(1.0 - q, -1.0 / p->alpha);
  }
  if (const auto *s = std::get_if<ShiftedExponential>(&d)) {
    return s->delta - std::log(1.0 - q) / s->lambda;
  }
  const auto &v = std::get<Empirical>(d).samples;
  const double h = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(i);
  return v[i] + frac * (v[i + 1] - v[i]);
}

inline double mean_of(const DistributionModel &d) {
  if (const auto *p = std::get_if<Pareto>(&d)) {
    if (p->alpha <= 1.0) {
      throw std::domain_error("mean_of: Pareto has infinite mean for alpha <= 1");
    }
    return p->xm * p->alpha / (p->alpha - 1.0);
  }
  if (const auto *s = std::get_if<ShiftedExponential>(&d)) {
    return s->delta + 1.0 / s->lambda;
  }
  const auto &v = std::get<Empirical>(d).samples;
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

// Inverse-transform sampling; deterministic for a fixed source and call
// sequence. Rng needs only a uniform() member returning a draw in (0,1).
template <class Rng>
double sample(const DistributionModel &d, Rng &rng) {
  return quantile(d, rng.uniform());
}

// Lower end of the support (used for integration brackets).
inline double lower_support(const DistributionModel &d) {
  if (const auto *p = std::get_if<Pareto>(&d)) return p->xm;
  if (const auto *s = std::get_if<ShiftedExponential>(&d)) return s->delta;
  return std::get<Empirical>(d).samples.front();
}

inline std::string family_name(const DistributionModel &d) {
  if (std::holds_alternative<Pareto>(d)) return "pareto";
  if (std::holds_alternative<ShiftedExponential>(d)) return "sexp";
  return "empirical";
}

}  // namespace sfork
