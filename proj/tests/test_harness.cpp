#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "tribesim/harness.hpp"

using namespace tribesim;

namespace {

Model1Config model1(std::size_t n, std::size_t shocks, std::size_t periods, std::size_t reps) {
    Model1Config c;
    c.n = n;
    c.shocks = shocks;
    c.periods = periods;
    c.replications = reps;
    return c;
}

const AggregateRow& row_for(const SweepResult& r, std::size_t point, const std::string& metric) {
    for (const auto& row : r.rows)
        if (row.point == point && row.metric == metric) return row;
    throw std::runtime_error("missing row");
}

}  // namespace

TEST(FixedRatio, Examples) {
    EXPECT_EQ(fixed_ratio_shocks(100, 2.0), 50u);
    EXPECT_EQ(fixed_ratio_shocks(100, 100.0 / 46.0), 46u);
    EXPECT_EQ(fixed_ratio_shocks(400, 100.0 / 46.0), 184u);
    EXPECT_THROW(fixed_ratio_shocks(10, 0.0), Error);
    EXPECT_THROW(fixed_ratio_shocks(1, 100.0), Error);
}

TEST(FixedRatio, ShocksScaleWithSize) {
    for (double ratio : {1.5, 2.0, 100.0 / 46.0, 5.0}) {
        EXPECT_NEAR(double(fixed_ratio_shocks(800, ratio)) / double(fixed_ratio_shocks(100, ratio)), 8.0, 0.1);
    }
}

TEST(FixedRatio, MeanStaysAtOnePlusTwoTRoverRatio) {
    // S * T / N is constant, so mean fitness is the same at every size.
    for (std::size_t n : {50u, 100u, 200u, 400u}) {
        Model1Config c = model1(n, 0, 20, 1);
        c.mode = ShockMode::fixed_ratio;
        Rng rng(1);
        const double mean = summarize(simulate_model1(c, rng, false).final_fitness).average_fit;
        const double expected = 1.0 + 2.0 * 20.0 * 0.05 * double(effective_shocks(c)) / double(n);
        EXPECT_NEAR(mean, expected, 1e-12);
        EXPECT_NEAR(mean, 1.92, 0.01);
    }
}

TEST(Sweep, SingleReplicationHasZeroStd) {
    const std::vector<GridPoint<Model1Config>> points{{"base", model1(30, 10, 5, 1)}};
    const SweepResult r = run_model1_sweep(points, 7, 1);
    ASSERT_EQ(r.records.size(), 1u);
    const AggregateRow& row = row_for(r, 0, "average_fit");
    EXPECT_TRUE(row.single_sample);
    EXPECT_EQ(row.std, 0.0);
    EXPECT_EQ(row.mean, r.records[0].values[0]);
}

TEST(Sweep, PositiveRewardsGiveExactMeanAndNoSpread) {
    const std::vector<GridPoint<Model1Config>> points{{"base", model1(100, 46, 20, 40)}};
    const SweepResult r = run_model1_sweep(points, 8, 1);
    const AggregateRow& row = row_for(r, 0, "average_fit");
    EXPECT_NEAR(*row.mean, 1.0 + 2.0 * 46 * 20 * 0.05 / 100.0, 1e-12);
    EXPECT_LT(row.std, 1e-12);
}

TEST(Sweep, SymmetricRewardsAverageNearOne) {
    Model1Config c = model1(100, 0, 20, 1000);
    c.mode = ShockMode::fixed_ratio;
    c.scheme.p = 0.5;
    const std::vector<GridPoint<Model1Config>> points{{"base", c}};
    const SweepResult r = run_model1_sweep(points, 9, 0);
    const AggregateRow& row = row_for(r, 0, "average_fit");
    EXPECT_LE(std::abs(*row.mean - 1.0), 3.0 * row.std);
    EXPECT_LE(std::abs(*row.mean - 1.0), 3.0 * row.std / std::sqrt(1000.0) + 0.01);
}

TEST(Sweep, ResultsIndependentOfJobCount) {
    Model2Config c;
    c.n = 20;
    c.periods = 20;
    c.replications = 12;
    std::vector<SweepAxis> axes{{"epsilon", {"0.2", "1"}}};
    const auto points = expand_grid(c, std::span<const SweepAxis>(axes));
    const SweepResult one = run_model2_sweep(points, 10, 1);
    const SweepResult four = run_model2_sweep(points, 10, 4);
    ASSERT_EQ(one.records.size(), four.records.size());
    for (std::size_t i = 0; i < one.records.size(); ++i) {
        EXPECT_EQ(one.records[i].seed, four.records[i].seed);
        EXPECT_EQ(one.records[i].values, four.records[i].values);
    }
}

TEST(Sweep, RecordedSeedReproducesReplication) {
    Model1Config c = model1(40, 20, 10, 5);
    c.scheme.p = 0.5;
    const std::vector<GridPoint<Model1Config>> points{{"a", c}, {"b", c}};
    const SweepResult r = run_model1_sweep(points, 11, 2);
    for (const auto& rec : r.records) {
        EXPECT_EQ(rec.seed, derive_seed(11, rec.point, rec.replication));
        Rng rng(rec.seed);
        EXPECT_EQ(model1_replicate(points[rec.point].config, rng), rec.values);
    }
    EXPECT_NE(r.records[0].values, r.records[5].values);
}

TEST(Aggregate, MatchesWelfordWithUndefinedEntries) {
    Rng rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::optional<double>> values(1 + rng.index(200));
        for (auto& v : values) {
            if (!rng.bernoulli(0.1)) v = 100.0 * rng.normal();
        }
        const AggregateRow row = aggregate_metric(values);
        const oracle::Moments m = oracle::welford(values);
        EXPECT_EQ(row.defined, m.count);
        EXPECT_EQ(row.defined + row.undefined, values.size());
        if (m.count == 0) {
            EXPECT_FALSE(row.mean.has_value());
            continue;
        }
        EXPECT_NEAR(*row.mean, m.mean, 1e-12 * std::max(1.0, std::abs(m.mean)));
        EXPECT_NEAR(row.std, m.std, 1e-12 * std::max(1.0, m.std));
    }
}

TEST(ExpandGrid, CartesianOrderAndLabels) {
    Model2Config c;
    std::vector<SweepAxis> axes{{"alpha", {"0.9", "0.99"}}, {"epsilon", {"0.1", "0.2", "0.3"}}};
    const auto points = expand_grid(c, std::span<const SweepAxis>(axes));
    ASSERT_EQ(points.size(), 6u);
    EXPECT_EQ(points[0].label, "alpha=0.9;epsilon=0.1");
    EXPECT_EQ(points[5].label, "alpha=0.99;epsilon=0.3");
    EXPECT_EQ(points[4].config.alpha, 0.99);
    EXPECT_EQ(points[4].config.epsilon, 0.2);
}

TEST(ExpandGrid, NoAxesGivesBasePoint) {
    const auto points = expand_grid(Model1Config{}, {});
    ASSERT_EQ(points.size(), 1u);
    EXPECT_EQ(points[0].label, "base");
}

TEST(ExpandGrid, InvalidValueIsReported) {
    std::vector<SweepAxis> axes{{"alpha", {"0.5", "1.5"}}};
    try {
        (void)expand_grid(Model2Config{}, std::span<const SweepAxis>(axes));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::validation_error);
    }
}

TEST(ParallelFor, RethrowsTaskFailure) {
    EXPECT_THROW(parallel_for(50, 4, [](std::size_t i) {
                     if (i == 17) throw Error(ErrorCode::invalid_argument, "boom");
                 }),
                 Error);
}
