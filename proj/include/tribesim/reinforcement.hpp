#pragma once

// Fitness reinforcement on regenerated Bianconi-Barabasi networks.
//
// Every period the network is regrown from the current fitness, a number of
// shocks hit uniformly drawn edges, and both endpoints of a shocked edge are
// credited the same signed reward. Experience is added to fitness once per
// period and the result is floored at zero.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tribesim/bb_generator.hpp"
#include "tribesim/error.hpp"
#include "tribesim/graph.hpp"
#include "tribesim/random.hpp"

namespace tribesim {

struct RewardScheme {
    double p = 1.0;        // probability that a shock's reward is positive
    double reward = 0.05;  // magnitude
};

enum class ShockMode {
    fixed_shocks,  // `shocks` per period regardless of n
    fixed_ratio,   // shocks = round(n / ratio)
};

struct Model1Config {
    std::size_t n = 100;
    std::size_t shocks = 46;
    std::size_t periods = 20;
    RewardScheme scheme;
    double initial_fitness = 1.0;
    BBParams bb;
    std::size_t replications = 1000;
    std::optional<std::uint64_t> master_seed;
    ShockMode mode = ShockMode::fixed_shocks;
    double ratio = 100.0 / 46.0;  // agents per shock, used in fixed_ratio mode
};

/// Shocks per period that keep n / shocks at `ratio`.
inline std::size_t fixed_ratio_shocks(std::size_t n, double ratio) {
    if (!(ratio > 0.0) || !std::isfinite(ratio)) {
        throw Error(ErrorCode::invalid_argument, "ratio must be positive");
    }
    const double s = std::round(static_cast<double>(n) / ratio);
    if (!(s >= 1.0)) {
        throw Error(ErrorCode::invalid_argument,
                    "ratio " + std::to_string(ratio) + " leaves no shocks for n = " + std::to_string(n));
    }
    return static_cast<std::size_t>(s);
}

inline std::size_t effective_shocks(const Model1Config& c) {
    return c.mode == ShockMode::fixed_ratio ? fixed_ratio_shocks(c.n, c.ratio) : c.shocks;
}

inline void validate(const Model1Config& c) {
    validate(c.bb);
    if (c.n < c.bb.m0) throw Error(ErrorCode::validation_error, "n must be >= m0");
    if (!(c.scheme.p >= 0.0 && c.scheme.p <= 1.0)) throw Error(ErrorCode::validation_error, "p must lie in [0,1]");
    if (!(c.scheme.reward > 0.0) || !std::isfinite(c.scheme.reward)) {
        throw Error(ErrorCode::validation_error, "reward must be > 0");
    }
    if (!(c.initial_fitness > 0.0) || !std::isfinite(c.initial_fitness)) {
        throw Error(ErrorCode::validation_error, "initial_fitness must be > 0");
    }
    if (c.replications == 0) throw Error(ErrorCode::validation_error, "replications must be >= 1");
    if (c.mode == ShockMode::fixed_ratio) {
        try {
            (void)fixed_ratio_shocks(c.n, c.ratio);
        } catch (const Error& e) {
            throw Error(ErrorCode::validation_error, e.what());
        }
    }
}

/// +reward with probability p, -reward otherwise. Always consumes one draw.
inline double draw_reward(const RewardScheme& scheme, Rng& rng) {
    return rng.bernoulli(scheme.p) ? scheme.reward : -scheme.reward;
}

struct PeriodOutcome {
    FitnessVector fitness;
    bool degenerate = false;  // all fitness was zero; generation fell back to uniform scores
    std::vector<std::uint32_t> degree;  // per agent, in this period's network
    std::vector<std::uint32_t> hits;    // shocks received per agent
};

inline PeriodOutcome run_period(const FitnessVector& fitness, const Model1Config& config, Rng& rng) {
    if (fitness.size() != config.n) throw Error(ErrorCode::invalid_argument, "fitness vector length differs from n");
    const bool degenerate = std::all_of(fitness.begin(), fitness.end(), [](double f) { return f == 0.0; });

    const SocialGraph network = generate_bb(config.n, config.bb, fitness, rng);
    PeriodOutcome out{fitness, degenerate, std::vector<std::uint32_t>(config.n), std::vector<std::uint32_t>(config.n, 0)};
    for (AgentId i = 0; i < config.n; ++i) out.degree[i] = static_cast<std::uint32_t>(network.degree(i));

    FitnessVector experience(config.n, 0.0);
    const std::size_t shocks = effective_shocks(config);
    for (std::size_t s = 0; s < shocks; ++s) {
        const auto [a, b] = network.random_edge(rng);
        const double reward = draw_reward(config.scheme, rng);
        experience[a] += reward;
        experience[b] += reward;
        ++out.hits[a];
        ++out.hits[b];
    }

    for (std::size_t i = 0; i < config.n; ++i) out.fitness[i] = std::max(0.0, out.fitness[i] + experience[i]);
    return out;
}

struct Model1Run {
    FitnessVector final_fitness;
    std::vector<FitnessVector> trajectory;  // fitness after each period
    std::size_t degenerate_periods = 0;
};

inline Model1Run simulate_model1(const Model1Config& config, Rng& rng, bool record_trajectory = true) {
    validate(config);
    Model1Run run;
    run.final_fitness.assign(config.n, config.initial_fitness);
    if (record_trajectory) run.trajectory.reserve(config.periods);
    for (std::size_t t = 0; t < config.periods; ++t) {
        PeriodOutcome period = run_period(run.final_fitness, config, rng);
        run.degenerate_periods += period.degenerate ? 1 : 0;
        run.final_fitness = std::move(period.fitness);
        if (record_trajectory) run.trajectory.push_back(run.final_fitness);
    }
    return run;
}

struct RunSummary {
    double average_fit = 0.0;
    std::optional<double> max_to_median;  // empty when the median is zero
    std::optional<double> max_to_min;     // empty when the minimum is zero
};

/// Median of the sorted values; mean of the two middle values for even length.
inline double median(std::vector<double> values) {
    if (values.empty()) throw Error(ErrorCode::invalid_argument, "median of empty vector");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

inline RunSummary summarize(const FitnessVector& fitness) {
    if (fitness.empty()) throw Error(ErrorCode::invalid_argument, "cannot summarize an empty fitness vector");
    double sum = 0.0;
    for (double f : fitness) sum += f;
    const auto [lo, hi] = std::minmax_element(fitness.begin(), fitness.end());
    const double med = median(fitness);

    RunSummary s;
    s.average_fit = sum / static_cast<double>(fitness.size());
    if (med != 0.0) s.max_to_median = *hi / med;
    if (*lo != 0.0) s.max_to_min = *hi / *lo;
    return s;
}

}  // namespace tribesim
