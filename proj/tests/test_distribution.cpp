#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sfork/distribution.hpp"
#include "sfork/random.hpp"
#include "support/oracles.hpp"

using namespace sfork;

TEST_CASE("pareto cdf and tail") {
  const auto d = pareto(2.0, 2.0);
  CHECK(cdf(d, 2.0) == 0.0);
  CHECK(cdf(d, 4.0) == Catch::Approx(0.75).margin(1e-15));
  CHECK(cdf(d, 1.0) == 0.0);
  CHECK(tail(d, 4.0) == Catch::Approx(0.25).margin(1e-15));
}

TEST_CASE("shifted exponential cdf and tail") {
  const auto d = shifted_exponential(1.0, 1.0);
  CHECK(cdf(d, 1.0) == 0.0);
  CHECK(cdf(d, 0.5) == 0.0);
  CHECK(tail(d, 2.0) == Catch::Approx(std::exp(-1.0)).margin(1e-12));
}

TEST_CASE("empirical step ecdf") {
  const auto d = empirical({1.0, 2.0, 3.0, 4.0});
  CHECK(tail(d, 2.5) == Catch::Approx(0.5).margin(1e-15));
  CHECK(cdf(d, 1.0) == Catch::Approx(0.25).margin(1e-15));
  CHECK(cdf(d, 0.5) == 0.0);
  CHECK(cdf(d, 4.0) == 1.0);
}

TEST_CASE("quantiles") {
  CHECK(quantile(pareto(2.0, 2.0), 0.75) == Catch::Approx(4.0).margin(1e-12));
  CHECK(quantile(shifted_exponential(1.0, 1.0), 1.0 - std::exp(-1.0)) ==
        Catch::Approx(2.0).margin(1e-12));
  CHECK(quantile(empirical({0.0, 10.0}), 0.5) == Catch::Approx(5.0).margin(1e-12));
  CHECK_THROWS_AS(quantile(pareto(2.0, 2.0), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(quantile(pareto(2.0, 2.0), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(quantile(pareto(2.0, 2.0), -0.3), std::invalid_argument);
}

TEST_CASE("means") {
  CHECK(mean_of(pareto(2.0, 2.0)) == Catch::Approx(4.0).margin(1e-12));
  CHECK(mean_of(shifted_exponential(1.0, 1.0)) == Catch::Approx(2.0).margin(1e-12));
  CHECK(mean_of(empirical({1.0, 2.0, 3.0})) == Catch::Approx(2.0).margin(1e-12));
  CHECK_THROWS_AS(mean_of(pareto(1.0, 1.0)), std::domain_error);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(pareto(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(pareto(2.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(shifted_exponential(-0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(shifted_exponential(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(empirical({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(empirical({1.0, -2.0}), std::invalid_argument);
}

TEST_CASE("empirical factory sorts its input") {
  const auto d = empirical({3.0, 1.0, 2.0});
  CHECK(quantile(d, 0.5) == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("sampling is inverse transform") {
  oracle::FakeRng fake{{0.5}};
  const auto d = pareto(2.0, 2.0);
  CHECK(sample(d, fake) == Catch::Approx(quantile(d, 0.5)).margin(1e-15));

  oracle::FakeRng fake75{{0.75}};
  CHECK(sample(d, fake75) == Catch::Approx(4.0).margin(1e-12));

  oracle::FakeRng any{{0.123}};
  CHECK(sample(empirical({3.0, 3.0, 3.0}), any) == Catch::Approx(3.0).margin(1e-15));
}

TEST_CASE("cdf plus tail is one exactly") {
  const std::vector<DistributionModel> dists = {
      pareto(2.0, 2.0), shifted_exponential(1.0, 0.5),
      empirical({0.5, 1.0, 2.5, 7.0})};
  for (const auto &d : dists) {
    for (double x = 0.0; x < 25.0; x += 0.173) {
      CHECK(cdf(d, x) + tail(d, x) == 1.0);
    }
  }
}

TEST_CASE("quantile inverts the cdf on parametric models") {
  const std::vector<DistributionModel> dists = {pareto(1.5, 0.7),
                                                shifted_exponential(2.0, 3.0)};
  for (const auto &d : dists) {
    for (int i = 1; i < 1000; ++i) {
      const double q = i / 1000.0;
      CHECK(std::abs(cdf(d, quantile(d, q)) - q) < 1e-12);
    }
  }
}

TEST_CASE("quantile is nondecreasing") {
  const std::vector<DistributionModel> dists = {
      pareto(2.0, 2.0), shifted_exponential(1.0, 1.0),
      empirical({0.0, 1.0, 1.0, 3.0, 9.0})};
  for (const auto &d : dists) {
    double prev = quantile(d, 1e-3);
    for (int i = 2; i < 1000; ++i) {
      const double cur = quantile(d, i / 1000.0);
      CHECK(cur >= prev);
      prev = cur;
    }
  }
}

TEST_CASE("inverse-transform samples pass a KS test at the 1% level") {
  const std::size_t count = 100000;
  const std::vector<DistributionModel> dists = {pareto(2.0, 2.0),
                                                shifted_exponential(1.0, 1.0)};
  std::uint64_t seed = 11;
  for (const auto &d : dists) {
    SplitRng rng(seed++);
    std::vector<double> draws(count);
    for (auto &x : draws) x = sample(d, rng);
    const double stat =
        oracle::ks_statistic(draws, [&](double x) { return cdf(d, x); });
    CHECK(stat < oracle::ks_critical_1pct(count));
  }
}
