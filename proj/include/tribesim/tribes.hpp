#pragma once

// Tribe formation: bounded-confidence exchange over a persistent graph with
// per-edge survival decay, stochastic edge death and similarity-weighted
// preferential rewiring.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tribesim/bb_generator.hpp"
#include "tribesim/error.hpp"
#include "tribesim/graph.hpp"
#include "tribesim/random.hpp"

namespace tribesim {

enum class SimilarityKernel {
    reciprocal,  // w = 1 / (1 + |fi - fj|)
    ingroup,     // w = 1 inside epsilon, out_weight outside
};

/// Which endpoint of a dead edge keeps the stub and picks a new partner.
enum class KeeperRule {
    uniform,            // fair coin between the endpoints
    protect_last_edge,  // an endpoint left with no other edge keeps the stub; coin otherwise
};

struct Model2Config {
    std::size_t n = 80;
    std::size_t shocks = 10;
    std::size_t periods = 200;
    double alpha = 0.9;
    double epsilon = 0.5;
    SimilarityKernel kernel = SimilarityKernel::reciprocal;
    double out_weight = 0.01;
    BBParams bb;
    double group_gap = 1e-3;
    std::size_t replications = 50;
    std::optional<std::uint64_t> master_seed;
    // Literal sum form |fa + fb| <= epsilon of the exchange condition.
    bool strict_eq4 = false;
    KeeperRule keeper_rule = KeeperRule::protect_last_edge;
    // Rewiring scores an isolated candidate as if it had degree 1. Without
    // this an agent that loses its last edge can never be chosen again.
    bool revive_isolated = true;
};

inline void validate(const Model2Config& c) {
    validate(c.bb);
    if (c.n < 2 || c.n < c.bb.m0) throw Error(ErrorCode::validation_error, "n must be >= max(2, m0)");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw Error(ErrorCode::validation_error, "alpha must lie in (0,1)");
    if (!(c.epsilon >= 0.0) || !std::isfinite(c.epsilon)) throw Error(ErrorCode::validation_error, "epsilon must be >= 0");
    if (!(c.out_weight > 0.0 && c.out_weight <= 1.0)) {
        throw Error(ErrorCode::validation_error, "out_weight must lie in (0,1]");
    }
    if (!(c.group_gap > 0.0) || !std::isfinite(c.group_gap)) throw Error(ErrorCode::validation_error, "group_gap must be > 0");
    if (c.replications == 0) throw Error(ErrorCode::validation_error, "replications must be >= 1");
}

struct Exchange {
    double a = 0.0;
    double b = 0.0;
    bool success = false;
};

/// Both agents move to their midpoint when |fa - fb| <= epsilon (or
/// |fa + fb| <= epsilon with strict_sum), otherwise nothing changes.
inline Exchange bounded_confidence_update(double fa, double fb, double epsilon, bool strict_sum = false) {
    const double gap = strict_sum ? std::abs(fa + fb) : std::abs(fa - fb);
    if (gap <= epsilon) {
        const double mid = 0.5 * (fa + fb);
        return {mid, mid, true};
    }
    return {fa, fb, false};
}

/// q <- min(1, alpha^(1-n) * q). The result never reaches zero.
inline double decay_q(double q, std::uint32_t n, double alpha) {
    const double exponent = 1.0 - static_cast<double>(n);
    const double decayed = std::pow(alpha, exponent) * q;
    return std::clamp(decayed, std::numeric_limits<double>::min(), 1.0);
}

inline double similarity_weight(double fi, double fj, SimilarityKernel kernel, double epsilon, double out_weight) {
    const double d = std::abs(fi - fj);
    if (kernel == SimilarityKernel::reciprocal) return 1.0 / (1.0 + d);
    return d < epsilon ? 1.0 : out_weight;
}

/// New partner for agent i: j != i with probability proportional to
/// w_ij * degree(j). Any j is eligible, current neighbours included. With
/// revive_isolated, degree-0 candidates count as degree 1.
inline AgentId rewire_target(AgentId i, const SocialGraph& g, const FitnessVector& fitness, const Model2Config& config,
                             Rng& rng) {
    const std::size_t n = g.node_count();
    if (n < 2) throw Error(ErrorCode::invalid_argument, "rewiring needs at least two agents");
    std::vector<AgentId> candidates;
    std::vector<double> weights;
    std::vector<std::size_t> degrees;
    candidates.reserve(n - 1);
    weights.reserve(n - 1);
    degrees.reserve(n - 1);
    for (AgentId j = 0; j < n; ++j) {
        if (j == i) continue;
        candidates.push_back(j);
        weights.push_back(similarity_weight(fitness[i], fitness[j], config.kernel, config.epsilon, config.out_weight));
        const std::size_t d = g.degree(j);
        degrees.push_back(config.revive_isolated ? std::max<std::size_t>(d, 1) : d);
    }
    return select_by_kernel(candidates, weights, degrees, rng);
}

struct PeriodMetrics {
    std::size_t deaths = 0;
    std::size_t group_count = 0;
    std::size_t component_count = 0;
    std::size_t successes = 0;
    // Rewires whose target was still a neighbour after every resample; the
    // existing edge was refreshed instead, so the edge count dropped by one.
    std::size_t merged = 0;
};

/// Groups of sorted fitness values separated by gaps larger than group_gap.
inline std::size_t count_groups(FitnessVector fitness, double group_gap) {
    if (!(group_gap > 0.0)) throw Error(ErrorCode::invalid_argument, "group_gap must be > 0");
    if (fitness.empty()) return 0;
    std::sort(fitness.begin(), fitness.end());
    std::size_t groups = 1;
    for (std::size_t i = 1; i < fitness.size(); ++i) {
        if (fitness[i] - fitness[i - 1] > group_gap) ++groups;
    }
    return groups;
}

/// One period: shocks, decay, death draws, rewiring, success-count reset.
inline PeriodMetrics step_period(SocialGraph& g, FitnessVector& fitness, const Model2Config& config, Rng& rng) {
    if (g.edge_count() == 0) throw Error(ErrorCode::empty_graph, "tribes step needs at least one edge");
    if (fitness.size() != g.node_count()) throw Error(ErrorCode::invalid_argument, "fitness vector length differs from n");
    PeriodMetrics metrics;

    for (std::size_t s = 0; s < config.shocks; ++s) {
        EdgeState& e = g.edge(g.random_edge_index(rng));
        const Exchange x = bounded_confidence_update(fitness[e.a], fitness[e.b], config.epsilon, config.strict_eq4);
        fitness[e.a] = x.a;
        fitness[e.b] = x.b;
        if (x.success) {
            ++e.n;
            ++metrics.successes;
        }
    }

    for (EdgeState& e : g.edges()) e.q = decay_q(e.q, e.n, config.alpha);

    std::vector<std::pair<AgentId, AgentId>> dead;
    for (const EdgeState& e : g.edges()) {
        if (e.q < rng.uniform()) dead.emplace_back(e.a, e.b);
    }
    metrics.deaths = dead.size();

    const std::size_t attempts = g.node_count();
    for (const auto& [a, b] : dead) {
        g.remove_edge(a, b);
        AgentId keeper = rng.index(2) == 0 ? a : b;
        if (config.keeper_rule == KeeperRule::protect_last_edge) {
            const bool a_alone = g.degree(a) == 0;
            const bool b_alone = g.degree(b) == 0;
            if (a_alone != b_alone) keeper = a_alone ? a : b;
        }
        AgentId target = keeper;
        bool placed = false;
        for (std::size_t k = 0; k < attempts && !placed; ++k) {
            target = rewire_target(keeper, g, fitness, config, rng);
            placed = g.add_edge(keeper, target, 1.0) == EdgeInsert::added;
        }
        if (!placed) {
            g.edge(*g.find_edge(keeper, target)).q = 1.0;
            ++metrics.merged;
        }
    }

    g.reset_success_counts();
    metrics.group_count = count_groups(fitness, config.group_gap);
    metrics.component_count = component_count(g);
    return metrics;
}

struct TribeMetrics {
    std::vector<PeriodMetrics> periods;
    FitnessVector initial_fitness;
    FitnessVector final_fitness;
    SocialGraph final_graph;
};

/// Fitness is drawn standard normal; the initial network is grown with
/// all-ones generation fitness, independently of the drawn values.
inline TribeMetrics simulate_model2(const Model2Config& config, Rng& rng) {
    validate(config);
    FitnessVector fitness(config.n);
    for (double& f : fitness) f = rng.normal();
    const FitnessVector ones(config.n, 1.0);
    TribeMetrics out{{}, fitness, {}, generate_bb(config.n, config.bb, ones, rng)};
    out.periods.reserve(config.periods);
    for (std::size_t t = 0; t < config.periods; ++t) {
        out.periods.push_back(step_period(out.final_graph, fitness, config, rng));
    }
    out.final_fitness = std::move(fitness);
    return out;
}

}  // namespace tribesim
