#pragma once

// Independent reference computations used by the tests. None of these call
// into the code paths they are used to check.

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Edge = std::pair<std::size_t, std::size_t>;
using Partition = std::set<std::set<std::size_t>>;

/// Components via Warshall transitive closure of the adjacency matrix.
inline Partition reachability_partition(std::size_t n, const std::vector<Edge>& edges) {
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i) reach[i][i] = 1;
    for (const auto& [a, b] : edges) reach[a][b] = reach[b][a] = 1;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (reach[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = 1;
    Partition blocks;
    for (std::size_t i = 0; i < n; ++i) {
        std::set<std::size_t> block;
        for (std::size_t j = 0; j < n; ++j)
            if (reach[i][j]) block.insert(j);
        blocks.insert(block);
    }
    return blocks;
}

inline double chi_square_critical(std::size_t dof, double significance) {
    boost::math::chi_squared dist(static_cast<double>(dof));
    return boost::math::quantile(boost::math::complement(dist, significance));
}

inline double chi_square_statistic(const std::vector<std::size_t>& observed, const std::vector<double>& probabilities) {
    const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double expected = total * probabilities[i];
        stat += (observed[i] - expected) * (observed[i] - expected) / expected;
    }
    return stat;
}

inline double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

/// Welford running mean and sample variance over the defined values.
struct Moments {
    double mean = 0.0;
    double std = 0.0;
    std::size_t count = 0;
};

inline Moments welford(const std::vector<std::optional<double>>& values) {
    Moments m;
    double m2 = 0.0;
    for (const auto& v : values) {
        if (!v) continue;
        ++m.count;
        const double delta = *v - m.mean;
        m.mean += delta / static_cast<double>(m.count);
        m2 += delta * (*v - m.mean);
    }
    m.std = m.count > 1 ? std::sqrt(m2 / static_cast<double>(m.count - 1)) : 0.0;
    return m;
}

inline std::vector<double> ranks(const std::vector<double>& x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) { return pearson(ranks(x), ranks(y)); }

/// Exact probability of each edge {t, j} in Bianconi-Barabasi growth with
/// m = 1, seed edge {0, 1}, and arrivals in index order, by enumerating
/// every growth history.
inline std::map<Edge, double> bb_edge_probabilities_m1(const std::vector<double>& fitness) {
    const std::size_t n = fitness.size();
    std::map<Edge, double> prob;
    std::vector<std::size_t> degree(n, 0);
    degree[0] = degree[1] = 1;
    std::function<void(std::size_t, double)> grow = [&](std::size_t t, double p) {
        if (t == n) return;
        double total = 0.0;
        for (std::size_t j = 0; j < t; ++j) total += fitness[j] * static_cast<double>(degree[j]);
        for (std::size_t j = 0; j < t; ++j) {
            const double pj = fitness[j] * static_cast<double>(degree[j]) / total;
            if (pj == 0.0) continue;
            prob[{j, t}] += p * pj;
            ++degree[j];
            ++degree[t];
            grow(t + 1, p * pj);
            --degree[j];
            --degree[t];
        }
    };
    grow(2, 1.0);
    return prob;
}

}  // namespace oracle
