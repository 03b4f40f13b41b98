#pragma once

// Monte Carlo harness: replications over a parameter grid with derived
// per-replication seeds, raw records, and mean / sample-std aggregates.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "tribesim/random.hpp"
#include "tribesim/reinforcement.hpp"
#include "tribesim/settings.hpp"
#include "tribesim/tribes.hpp"

namespace tribesim {

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

struct SweepSpec {
    AnyConfig base;
    std::vector<SweepAxis> axes;
};

template <typename Config>
struct GridPoint {
    std::string label;
    Config config;
};

using MetricValues = std::vector<std::optional<double>>;

struct ReplicationRecord {
    std::size_t point = 0;
    std::size_t replication = 0;
    std::uint64_t seed = 0;
    MetricValues values;  // one per metric; empty optional = undefined
};

struct AggregateRow {
    std::size_t point = 0;
    std::string label;
    std::string metric;
    std::optional<double> mean;  // empty when every replication was undefined
    double std = 0.0;
    std::size_t defined = 0;
    std::size_t undefined = 0;
    bool single_sample = false;
};

struct SweepResult {
    std::vector<std::string> metric_names;
    std::vector<std::string> point_labels;
    std::vector<std::string> point_configs;  // compact effective config per point
    std::uint64_t master_seed = 0;
    std::vector<ReplicationRecord> records;  // ordered by (point, replication)
    std::vector<AggregateRow> rows;          // ordered by (point, metric)
};

/// Runs fn(i) for i in [0, count) on `jobs` threads (0 = hardware threads).
/// The first exception thrown by any task is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, std::max<std::size_t>(count, 1));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(jobs);
        for (std::size_t w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = count;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

/// Cartesian product of the axes, first axis outermost. Each point is
/// validated after its settings are applied.
template <typename Config>
std::vector<GridPoint<Config>> expand_grid(const Config& base, std::span<const SweepAxis> axes) {
    std::vector<GridPoint<Config>> points{{"", base}};
    for (const SweepAxis& axis : axes) {
        if (axis.values.empty()) throw Error(ErrorCode::validation_error, "sweep axis '" + axis.key + "' has no values");
        std::vector<GridPoint<Config>> next;
        for (const auto& p : points) {
            for (const std::string& v : axis.values) {
                GridPoint<Config> q = p;
                apply_setting(q.config, axis.key, v);
                q.label += (q.label.empty() ? "" : ";") + axis.key + "=" + v;
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }
    for (auto& p : points) {
        if (p.label.empty()) p.label = "base";
        validate(p.config);
    }
    return points;
}

/// Mean and sample (n-1) standard deviation of the defined values.
inline AggregateRow aggregate_metric(std::span<const std::optional<double>> values) {
    AggregateRow row;
    double sum = 0.0;
    for (const auto& v : values) {
        if (v) {
            sum += *v;
            ++row.defined;
        } else {
            ++row.undefined;
        }
    }
    row.single_sample = row.defined == 1;
    if (row.defined == 0) return row;
    const double mean = sum / static_cast<double>(row.defined);
    row.mean = mean;
    if (row.defined > 1) {
        double ss = 0.0;
        for (const auto& v : values) {
            if (v) ss += (*v - mean) * (*v - mean);
        }
        row.std = std::sqrt(ss / static_cast<double>(row.defined - 1));
    }
    return row;
}

/// Deterministic reduce over records ordered by (point, replication).
inline std::vector<AggregateRow> aggregate(std::span<const ReplicationRecord> records,
                                           std::span<const std::string> metric_names,
                                           std::span<const std::string> point_labels) {
    std::vector<AggregateRow> rows;
    for (std::size_t p = 0; p < point_labels.size(); ++p) {
        for (std::size_t m = 0; m < metric_names.size(); ++m) {
            std::vector<std::optional<double>> column;
            for (const auto& r : records) {
                if (r.point == p) column.push_back(r.values.at(m));
            }
            AggregateRow row = aggregate_metric(column);
            row.point = p;
            row.label = point_labels[p];
            row.metric = metric_names[m];
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

/// Runs config.replications replications of every grid point. Replication k
/// of point p always uses derive_seed(master_seed, p, k), so results do not
/// depend on `jobs` or on completion order.
template <typename Config, typename Replicate>
SweepResult run_sweep(std::span<const GridPoint<Config>> points, std::vector<std::string> metric_names,
                      std::uint64_t master_seed, std::size_t jobs, Replicate&& replicate) {
    SweepResult result;
    result.metric_names = std::move(metric_names);
    result.master_seed = master_seed;
    for (const auto& p : points) {
        validate(p.config);
        result.point_labels.push_back(p.label);
        result.point_configs.push_back(compact(describe(p.config)));
        for (std::size_t k = 0; k < p.config.replications; ++k) {
            result.records.push_back({result.point_labels.size() - 1, k, derive_seed(master_seed, result.point_labels.size() - 1, k), {}});
        }
    }

    parallel_for(result.records.size(), jobs, [&](std::size_t i) {
        ReplicationRecord& rec = result.records[i];
        Rng rng(rec.seed);
        rec.values = replicate(points[rec.point].config, rng);
        if (rec.values.size() != result.metric_names.size()) {
            throw Error(ErrorCode::invalid_argument, "replication returned the wrong number of metrics");
        }
    });

    result.rows = aggregate(result.records, result.metric_names, result.point_labels);
    return result;
}

// Model-specific replication functions.

inline std::vector<std::string> model1_metric_names() { return {"average_fit", "max_to_median", "max_to_min"}; }

inline MetricValues model1_replicate(const Model1Config& config, Rng& rng) {
    const Model1Run run = simulate_model1(config, rng, false);
    const RunSummary s = summarize(run.final_fitness);
    return {s.average_fit, s.max_to_median, s.max_to_min};
}

inline std::vector<std::string> model2_metric_names() {
    return {"final_group_count", "mean_deaths_per_period", "final_component_count", "final_edge_count"};
}

inline MetricValues model2_replicate(const Model2Config& config, Rng& rng) {
    const TribeMetrics run = simulate_model2(config, rng);
    MetricValues values(4);
    if (run.periods.empty()) {
        values[0] = static_cast<double>(count_groups(run.final_fitness, config.group_gap));
        values[2] = static_cast<double>(component_count(run.final_graph));
    } else {
        double deaths = 0.0;
        for (const auto& p : run.periods) deaths += static_cast<double>(p.deaths);
        values[0] = static_cast<double>(run.periods.back().group_count);
        values[1] = deaths / static_cast<double>(run.periods.size());
        values[2] = static_cast<double>(run.periods.back().component_count);
    }
    values[3] = static_cast<double>(run.final_graph.edge_count());
    return values;
}

inline SweepResult run_model1_sweep(std::span<const GridPoint<Model1Config>> points, std::uint64_t seed, std::size_t jobs) {
    return run_sweep(points, model1_metric_names(), seed, jobs, model1_replicate);
}

inline SweepResult run_model2_sweep(std::span<const GridPoint<Model2Config>> points, std::uint64_t seed, std::size_t jobs) {
    return run_sweep(points, model2_metric_names(), seed, jobs, model2_replicate);
}

}  // namespace tribesim
