#pragma once

// Bianconi-Barabasi growth: an arriving node attaches to existing node j
// with probability proportional to fitness_j * degree_j.

#include <bit>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tribesim/error.hpp"
#include "tribesim/graph.hpp"
#include "tribesim/random.hpp"

namespace tribesim {

using FitnessVector = std::vector<double>;

struct BBParams {
    std::size_t m0 = 3;  // seed clique size
    std::size_t m = 2;   // edges per arriving node
    // Arrival order is a fresh random permutation of the agents on every
    // generation; otherwise agents 0..m0-1 would always form the seed clique.
    bool shuffle_arrivals = true;
};

inline void validate(const BBParams& p) {
    if (p.m0 < 2) throw Error(ErrorCode::validation_error, "m0 must be >= 2");
    if (p.m < 1 || p.m > p.m0) throw Error(ErrorCode::validation_error, "m must satisfy 1 <= m <= m0");
}

/// Draws index i with probability scores[i] / sum(scores); uniform when the
/// sum is zero. Scores must be nonnegative.
inline std::size_t sample_proportional(std::span<const double> scores, Rng& rng) {
    if (scores.empty()) throw Error(ErrorCode::invalid_argument, "no candidates to select from");
    double total = 0.0;
    for (double s : scores) total += s;
    if (!(total > 0.0)) return rng.index(scores.size());

    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] <= 0.0) continue;
        acc += scores[i];
        last_positive = i;
        if (target < acc) return i;
    }
    return last_positive;  // rounding at the top end
}

/// Kernel selection r_j = w_j * degree_j over the candidate list.
inline AgentId select_by_kernel(std::span<const AgentId> candidates, std::span<const double> weights,
                                std::span<const std::size_t> degrees, Rng& rng) {
    if (candidates.empty()) throw Error(ErrorCode::invalid_argument, "empty candidate list");
    if (weights.size() != candidates.size() || degrees.size() != candidates.size()) {
        throw Error(ErrorCode::invalid_argument, "candidate, weight and degree lists differ in length");
    }
    std::vector<double> scores(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!(weights[i] >= 0.0)) throw Error(ErrorCode::invalid_argument, "negative kernel weight");
        scores[i] = weights[i] * static_cast<double>(degrees[i]);
    }
    return candidates[sample_proportional(scores, rng)];
}

namespace detail {

// Complete binary sum tree. Internal sums are recomputed from both children on
// every update, so an all-zero set of leaves has a total of exactly zero.
class SumTree {
public:
    explicit SumTree(std::size_t n) : capacity_(std::bit_ceil(std::max<std::size_t>(n, 1))), tree_(2 * capacity_, 0.0) {}

    void set(std::size_t i, double w) {
        std::size_t node = capacity_ + i;
        tree_[node] = w;
        for (node /= 2; node >= 1; node /= 2) tree_[node] = tree_[2 * node] + tree_[2 * node + 1];
    }

    double get(std::size_t i) const { return tree_[capacity_ + i]; }
    double total() const { return tree_[1]; }

    /// Leaf with positive weight, chosen proportionally. Requires total() > 0.
    std::size_t sample(Rng& rng) const {
        double target = rng.uniform() * total();
        std::size_t node = 1;
        while (node < capacity_) {
            const double left = tree_[2 * node];
            const double right = tree_[2 * node + 1];
            if (left > 0.0 && (target < left || right <= 0.0)) {
                node = 2 * node;
            } else {
                target -= left;
                node = 2 * node + 1;
            }
        }
        return node - capacity_;
    }

private:
    std::size_t capacity_;
    std::vector<double> tree_;
};

}  // namespace detail

/// Grows a Bianconi-Barabasi graph on n >= m0 agents (n == m0 yields just the
/// seed clique). Each later arrival picks m distinct targets without
/// replacement, renormalizing fitness * degree scores after each pick. If no
/// remaining candidate has a positive score the pick is uniform. All edges
/// start with q = 1, n = 0.
inline SocialGraph generate_bb(std::size_t n, const BBParams& params, std::span<const double> fitness, Rng& rng) {
    validate(params);
    if (n < params.m0) {
        throw Error(ErrorCode::invalid_argument,
                    "agent count " + std::to_string(n) + " is below seed clique size m0 = " + std::to_string(params.m0));
    }
    if (fitness.size() != n) throw Error(ErrorCode::invalid_argument, "fitness vector length differs from agent count");
    for (double f : fitness) {
        if (!(f >= 0.0) || !std::isfinite(f)) {
            throw Error(ErrorCode::invalid_argument, "generation fitness must be finite and nonnegative");
        }
    }

    std::vector<AgentId> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<AgentId>(i);
    if (params.shuffle_arrivals) rng.shuffle(std::span<AgentId>(order));

    SocialGraph g(n);
    detail::SumTree scores(n);
    for (std::size_t i = 0; i < params.m0; ++i) {
        for (std::size_t j = i + 1; j < params.m0; ++j) g.add_edge(order[i], order[j]);
    }
    for (std::size_t i = 0; i < params.m0; ++i) {
        scores.set(i, fitness[order[i]] * static_cast<double>(params.m0 - 1));
    }

    std::vector<std::size_t> picked;
    std::vector<char> taken(n, 0);
    for (std::size_t t = params.m0; t < n; ++t) {
        picked.clear();
        for (std::size_t k = 0; k < params.m; ++k) {
            std::size_t pos = 0;
            if (scores.total() > 0.0) {
                pos = scores.sample(rng);
            } else {
                do {
                    pos = rng.index(t);
                } while (taken[pos]);
            }
            taken[pos] = 1;
            scores.set(pos, 0.0);
            picked.push_back(pos);
        }
        const AgentId newcomer = order[t];
        for (std::size_t pos : picked) {
            const AgentId target = order[pos];
            g.add_edge(newcomer, target);
            taken[pos] = 0;
            scores.set(pos, fitness[target] * static_cast<double>(g.degree(target)));
        }
        scores.set(t, fitness[newcomer] * static_cast<double>(params.m));
    }
    return g;
}

/// Pure preferential attachment: Bianconi-Barabasi with constant fitness.
inline SocialGraph generate_preferential(std::size_t n, const BBParams& params, Rng& rng) {
    const FitnessVector ones(n, 1.0);
    return generate_bb(n, params, ones, rng);
}

inline std::size_t expected_bb_edge_count(std::size_t n, const BBParams& p) {
    return p.m0 * (p.m0 - 1) / 2 + p.m * (n - p.m0);
}

}  // namespace tribesim
