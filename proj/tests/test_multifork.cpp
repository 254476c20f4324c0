#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sfork/multifork.hpp"
#include "support/multifork_sim.hpp"

using namespace sfork;

TEST_CASE("stage validation") {
  CHECK_THROWS_AS(multi_fork({}), std::invalid_argument);
  CHECK_THROWS_AS(multi_fork({{0.2, 1, 0}, {0.3, 1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(multi_fork({{0.2, 1, 0}, {0.2, 1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(multi_fork({{1.2, 1, 0}}), std::invalid_argument);
  CHECK_NOTHROW(multi_fork({{0.5, 1, 0}, {0.1, 2, 1}}));
}

TEST_CASE("single stage degenerates to the single-fork metrics") {
  struct Case {
    DistributionModel base;
    ForkStage stage;
  };
  const Case cases[] = {
      {pareto(2.0, 2.0), {0.25, 1, 0}},
      {pareto(2.0, 2.0), {0.25, 1, 1}},
      {pareto(1.8, 0.5), {0.4, 2, 1}},
      {shifted_exponential(1.0, 1.0), {0.25, 1, 0}},
      {shifted_exponential(0.5, 2.0), {0.3, 2, 1}},
  };
  for (const auto &c : cases) {
    const MetricsPair staged =
        multi_fork_metrics(c.base, multi_fork({c.stage}), 400);
    const MetricsPair direct = metrics_general(
        c.base, single_fork(c.stage.p, c.stage.r, c.stage.l), 400);
    CHECK(std::abs(staged.latency - direct.latency) <=
          1e-6 * std::abs(direct.latency));
    CHECK(std::abs(staged.cost - direct.cost) <= 1e-6 * std::abs(direct.cost));
  }
}

TEST_CASE("two-stage exponential job has a closed form") {
  // With Delta = 0 every residual law stays exponential, so the whole
  // decomposition collapses to elementary expressions.
  const double lambda = 2.0;
  const double p1 = 0.5, p2 = 0.1;
  const int r1 = 1, r2 = 2;
  const long n = 400;
  const MetricsPair staged = multi_fork_metrics(
      shifted_exponential(0.0, lambda),
      multi_fork({{p1, r1, 1}, {p2, r2, 1}}), n);

  const double q2 = p2 / p1;  // per-stage fraction of the second fork
  const double rate2 = (r1 + 1) * lambda;
  const double rate3 = (r2 + 1) * rate2;
  const double expected_latency =
      -std::log(p1) / lambda - std::log(q2) / rate2 +
      (std::log(p2 * static_cast<double>(n)) + euler_mascheroni) / rate3;
  const double expected_cost =
      (1.0 - p1) / lambda + p1 * (1.0 - q2) / rate2 + p2 / rate2;
  CHECK(staged.latency == Catch::Approx(expected_latency).epsilon(1e-6));
  CHECK(staged.cost == Catch::Approx(expected_cost).epsilon(1e-6));
}

TEST_CASE("two-stage pareto policy matches the two-fork simulator") {
  const auto base = pareto(2.0, 2.0);
  const ForkStage s1{0.25, 1, 0};
  const ForkStage s2{0.1, 1, 0};
  const MetricsPair staged = multi_fork_metrics(base, multi_fork({s1, s2}), 400);
  const oracle::TwoForkRealization mc =
      oracle::mc_two_fork(base, s1, s2, 400, 10000, 61);
  CHECK(staged.latency == Catch::Approx(mc.latency).epsilon(0.05));
  CHECK(staged.cost == Catch::Approx(mc.cost).epsilon(0.05));

  const ForkStage k1{0.3, 1, 1};
  const ForkStage k2{0.09, 2, 1};
  const MetricsPair staged_keep =
      multi_fork_metrics(base, multi_fork({k1, k2}), 400);
  const oracle::TwoForkRealization mc_keep =
      oracle::mc_two_fork(base, k1, k2, 400, 10000, 67);
  CHECK(staged_keep.latency == Catch::Approx(mc_keep.latency).epsilon(0.05));
  CHECK(staged_keep.cost == Catch::Approx(mc_keep.cost).epsilon(0.05));
}

TEST_CASE("second fork must leave enough stragglers for the tail limit") {
  CHECK_THROWS_AS(
      multi_fork_metrics(pareto(2.0, 2.0), multi_fork({{0.5, 1, 0}, {0.001, 1, 0}}),
                         400),
      std::invalid_argument);
  CHECK_THROWS_AS(multi_fork_metrics(empirical({1.0, 2.0}),
                                     multi_fork({{0.5, 1, 0}}), 400),
                  std::invalid_argument);
}
