#include <gtest/gtest.h>

#include <cmath>

#include "haplodrift/branching.hpp"
#include "haplodrift/error.hpp"
#include "haplodrift/simulator.hpp"

using namespace haplodrift;

TEST(Simulator, FullMutationAllSingletons) {
  SimConfig cfg;
  cfg.initial_size = 5000;
  cfg.generations = 10;
  cfg.mu = 1.0;
  const auto s = simulate(cfg);
  ASSERT_EQ(s.final_generation.counts.size(), 1u);
  EXPECT_EQ(s.final_generation.counts[0], s.population_trajectory.back());
}

TEST(Simulator, DeterministicGivenSeed) {
  for (auto mode : {SimMode::WrightFisherFixed, SimMode::PoissonGrowth}) {
    SimConfig cfg;
    cfg.initial_size = 3000;
    cfg.generations = 40;
    cfg.mu = 0.05;
    cfg.lambda = mode == SimMode::PoissonGrowth ? 1.01 : 1.0;
    cfg.mode = mode;
    cfg.seed = 99;
    const auto a = simulate(cfg);
    const auto b = simulate(cfg);
    EXPECT_EQ(a.final_generation.counts, b.final_generation.counts);
    EXPECT_EQ(a.final_three_generations.counts, b.final_three_generations.counts);
    EXPECT_EQ(a.population_trajectory, b.population_trajectory);
    cfg.seed = 100;
    EXPECT_NE(simulate(cfg).final_generation.counts, a.final_generation.counts);
  }
}

TEST(Simulator, HistogramAccountsForEveryone) {
  SimConfig cfg;
  cfg.initial_size = 4000;
  cfg.generations = 30;
  cfg.mu = 0.03;
  cfg.mode = SimMode::PoissonGrowth;
  cfg.lambda = 1.02;
  const auto s = simulate(cfg);
  const auto n = s.population_trajectory.size();
  EXPECT_EQ(s.final_generation.individuals(), s.population_trajectory.back());
  EXPECT_EQ(s.final_three_generations.individuals(),
            s.population_trajectory[n - 1] + s.population_trajectory[n - 2] + s.population_trajectory[n - 3]);
}

TEST(Simulator, GrowthRatioNearLambda) {
  SimConfig cfg;
  cfg.initial_size = 200000;
  cfg.generations = 20;
  cfg.mode = SimMode::PoissonGrowth;
  cfg.lambda = 1.05;
  cfg.mu = 0.05;
  const auto s = simulate(cfg);
  const double ratio = std::pow(static_cast<double>(s.population_trajectory.back()) /
                                    static_cast<double>(s.population_trajectory.front()),
                                1.0 / 20.0);
  EXPECT_NEAR(ratio, 1.05, 0.003);

  cfg.mode = SimMode::WrightFisherFixed;
  const auto w = simulate(cfg);
  EXPECT_EQ(w.population_trajectory[20], static_cast<std::uint64_t>(std::llround(200000 * std::pow(1.05, 20))));
}

TEST(Simulator, ReportsExtinction) {
  SimConfig cfg;
  cfg.initial_size = 5;
  cfg.generations = 500;
  cfg.mode = SimMode::PoissonGrowth;
  cfg.lambda = 0.5;
  const auto s = simulate(cfg);
  ASSERT_TRUE(s.extinct_at.has_value());
  EXPECT_EQ(s.population_trajectory.back(), 0u);
  EXPECT_EQ(s.final_generation.clusters(), 0u);
}

TEST(Simulator, ClusterProportionsStabilize) {
  SimConfig cfg;
  cfg.initial_size = 100000;
  cfg.generations = 400;
  cfg.mu = 0.05;
  cfg.seed = 3;
  cfg.snapshot_generations = {300, 350, 400};
  const auto s = simulate(cfg);
  ASSERT_EQ(s.snapshots.size(), 3u);
  for (std::size_t i = 0; i + 1 < s.snapshots.size(); ++i) {
    const auto a = s.snapshots[i].histogram.proportions(64);
    const auto b = s.snapshots[i + 1].histogram.proportions(64);
    EXPECT_LT(total_variation(a, b, 64), 0.02);
  }
}

TEST(Simulator, StreamsDiffer) {
  auto a = make_stream(1, 0);
  auto b = make_stream(1, 1);
  auto c = make_stream(1, 0);
  const auto x = a();
  EXPECT_NE(x, b());
  EXPECT_EQ(x, c());
}

TEST(TotalProgeny, ZeroRate) {
  const auto h = total_progeny_histogram(0.0, 1000, 1);
  EXPECT_EQ(h.counts[0], 1000u);
  EXPECT_EQ(h.clusters(), 1000u);
}

TEST(TotalProgeny, BorelLaw) {
  const double lam = 0.5;
  const std::uint64_t trials = 200000;
  const auto h = total_progeny_histogram(lam, trials, 4);
  for (int n = 1; n <= 8; ++n) {
    const double p = std::exp(-lam * n + (n - 1) * std::log(lam * n) - std::lgamma(n + 1.0));
    const double se = std::sqrt(p * (1 - p) / trials);
    EXPECT_NEAR(static_cast<double>(h.counts[n - 1]) / trials, p, 4 * se) << n;
  }
  EXPECT_NEAR(static_cast<double>(h.individuals()) / trials, 2.0, 0.03);
  EXPECT_THROW(total_progeny_histogram(1.0, 10, 1), Error);
}
