#include <gtest/gtest.h>

#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "tribesim/reinforcement.hpp"

using namespace tribesim;

namespace {

double sum(const FitnessVector& f) { return std::accumulate(f.begin(), f.end(), 0.0); }

Model1Config small_config() {
    Model1Config c;
    c.n = 30;
    c.shocks = 25;
    c.periods = 10;
    c.replications = 1;
    return c;
}

}  // namespace

TEST(DrawReward, AlwaysPositiveAtPOne) {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(draw_reward({1.0, 0.05}, rng), 0.05);
}

TEST(DrawReward, AlwaysNegativeAtPZero) {
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(draw_reward({0.0, 0.05}, rng), -0.05);
}

TEST(DrawReward, SymmetricAtHalf) {
    Rng rng(3);
    double total = 0.0;
    for (int i = 0; i < 100000; ++i) total += draw_reward({0.5, 0.05}, rng);
    EXPECT_NEAR(total / 100000.0, 0.0, 0.001);
}

TEST(RunPeriod, PositiveRewardsConserveTotal) {
    Model1Config c = small_config();
    Rng rng(4);
    const FitnessVector before(c.n, 1.0);
    const PeriodOutcome out = run_period(before, c, rng);
    EXPECT_NEAR(sum(out.fitness) - sum(before), 2.0 * c.shocks * c.scheme.reward, 1e-12);
}

TEST(RunPeriod, NoShocksLeavesFitness) {
    Model1Config c = small_config();
    c.shocks = 0;
    Rng rng(5);
    const FitnessVector before{1, 2, 3, 4, 0, 1, 2, 3, 4, 5, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
    EXPECT_EQ(run_period(before, c, rng).fitness, before);
}

TEST(RunPeriod, SingleEdgeCreditsBothAgents) {
    Model1Config c;
    c.n = 2;
    c.bb = {2, 1};
    c.shocks = 3;
    c.scheme = {1.0, 0.05};
    Rng rng(6);
    const PeriodOutcome out = run_period(FitnessVector(2, 1.0), c, rng);
    EXPECT_NEAR(out.fitness[0], 1.15, 1e-15);
    EXPECT_NEAR(out.fitness[1], 1.15, 1e-15);
    EXPECT_EQ(out.hits[0], 3u);
    EXPECT_EQ(out.hits[1], 3u);
}

TEST(RunPeriod, FloorsAtZero) {
    Model1Config c = small_config();
    c.scheme = {0.0, 0.5};
    c.shocks = 200;
    Rng rng(7);
    const PeriodOutcome out = run_period(FitnessVector(c.n, 1.0), c, rng);
    for (double f : out.fitness) EXPECT_GE(f, 0.0);
}

TEST(RunPeriod, DegenerateFitnessFallsBackAndContinues) {
    Model1Config c = small_config();
    c.scheme = {0.0, 0.5};
    c.shocks = 400;
    c.periods = 4;
    Rng rng(8);
    const Model1Run run = simulate_model1(c, rng);
    EXPECT_GT(run.degenerate_periods, 0u);
    EXPECT_EQ(run.trajectory.size(), 4u);
    for (double f : run.final_fitness) EXPECT_EQ(f, 0.0);
}

TEST(SimulateModel1, ZeroPeriodsReturnsInitialVector) {
    Model1Config c = small_config();
    c.periods = 0;
    c.initial_fitness = 1.0;
    Rng rng(9);
    const Model1Run run = simulate_model1(c, rng);
    EXPECT_EQ(run.final_fitness, FitnessVector(c.n, 1.0));
    EXPECT_TRUE(run.trajectory.empty());
}

TEST(SimulateModel1, ConservationIdentityOverRandomConfigs) {
    Rng meta(10);
    for (int trial = 0; trial < 25; ++trial) {
        Model1Config c;
        c.n = 5 + meta.index(120);
        c.shocks = meta.index(80);
        c.periods = meta.index(25);
        c.scheme = {1.0, 0.01 + meta.uniform() * 0.2};
        Rng rng(500 + trial);
        const Model1Run run = simulate_model1(c, rng);
        const double expected = 1.0 + 2.0 * double(c.shocks) * double(c.periods) * c.scheme.reward / double(c.n);
        EXPECT_NEAR(sum(run.final_fitness) / double(c.n), expected, 1e-12 * double(c.periods + 1));
    }
}

TEST(SimulateModel1, SameSeedSameTrajectory) {
    Model1Config c = small_config();
    c.scheme.p = 0.5;
    Rng a(11);
    Rng b(11);
    EXPECT_EQ(simulate_model1(c, a).trajectory, simulate_model1(c, b).trajectory);
}

TEST(SimulateModel1, FloorHoldsEveryPeriod) {
    Rng meta(12);
    for (int trial = 0; trial < 20; ++trial) {
        Model1Config c = small_config();
        c.scheme = {meta.uniform(), 0.05 + meta.uniform() * 0.3};
        c.periods = 15;
        Rng rng(700 + trial);
        for (const auto& f : simulate_model1(c, rng).trajectory) {
            for (double x : f) ASSERT_GE(x, 0.0);
        }
    }
}

TEST(SimulateModel1, MeanFitnessFallsWithSizeAtFixedShocks) {
    double previous = 1e9;
    for (std::size_t n : {50u, 100u, 200u, 400u}) {
        Model1Config c;
        c.n = n;
        c.shocks = 46;
        c.periods = 20;
        Rng rng(13);
        const double mean = sum(simulate_model1(c, rng, false).final_fitness) / double(n);
        EXPECT_LT(mean, previous);
        previous = mean;
    }
}

TEST(SimulateModel1, HighDegreeAgentsReceiveMoreShocks) {
    Model1Config c;
    c.n = 50;
    c.shocks = 50;
    c.periods = 50;
    Rng rng(14);
    std::vector<double> hits(c.n, 0.0);
    std::vector<double> degree(c.n, 0.0);
    FitnessVector f(c.n, 1.0);
    for (std::size_t t = 0; t < c.periods; ++t) {
        PeriodOutcome out = run_period(f, c, rng);
        for (std::size_t i = 0; i < c.n; ++i) {
            hits[i] += out.hits[i];
            degree[i] += out.degree[i];
        }
        f = std::move(out.fitness);
    }
    // One-sided 95% critical value of Spearman's rho under independence.
    const double critical = oracle::normal_quantile(0.95) / std::sqrt(double(c.n - 1));
    EXPECT_GT(oracle::spearman(hits, degree), critical);
}

TEST(Summarize, ConstantVector) {
    const RunSummary s = summarize({1, 1, 1, 1});
    EXPECT_EQ(s.average_fit, 1.0);
    EXPECT_EQ(s.max_to_median, 1.0);
    EXPECT_EQ(s.max_to_min, 1.0);
}

TEST(Summarize, ZeroMinimumLeavesRatioUndefined) {
    const RunSummary s = summarize({0, 1, 2, 3});
    EXPECT_EQ(s.average_fit, 1.5);
    EXPECT_EQ(s.max_to_median, 2.0);
    EXPECT_FALSE(s.max_to_min.has_value());
}

TEST(Summarize, OddLengthMedian) {
    const RunSummary s = summarize({1, 2, 3, 4, 10});
    EXPECT_EQ(s.average_fit, 4.0);
    EXPECT_DOUBLE_EQ(*s.max_to_median, 10.0 / 3.0);
    EXPECT_EQ(s.max_to_min, 10.0);
}

TEST(Summarize, ZeroMedianLeavesRatioUndefined) {
    const RunSummary s = summarize({0, 0, 0, 5});
    EXPECT_FALSE(s.max_to_median.has_value());
    EXPECT_THROW(summarize({}), Error);
}

TEST(Model1Config, Validation) {
    Model1Config c;
    c.scheme.p = 1.5;
    EXPECT_THROW(validate(c), Error);
    c = Model1Config{};
    c.scheme.reward = 0.0;
    EXPECT_THROW(validate(c), Error);
    c = Model1Config{};
    c.initial_fitness = 0.0;
    EXPECT_THROW(validate(c), Error);
    c = Model1Config{};
    c.n = 2;
    EXPECT_THROW(validate(c), Error);
}
