#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tribesim/error.hpp"
#include "tribesim/random.hpp"

namespace tribesim {

using AgentId = std::uint32_t;
using EdgeIndex = std::size_t;

/// One undirected relation. `q` is the survival weight, `n` the number of
/// successful interactions on this edge during the current period.
struct EdgeState {
    AgentId a = 0;
    AgentId b = 0;
    double q = 1.0;
    std::uint32_t n = 0;

    AgentId other(AgentId x) const noexcept { return x == a ? b : a; }
};

enum class EdgeInsert { added, duplicate };

/// Undirected simple graph with per-edge state. Edge indices are not stable
/// across removals (removal swaps the last edge into the freed slot).
class SocialGraph {
public:
    explicit SocialGraph(std::size_t node_count) : adjacency_(node_count) {
        if (node_count == 0) {
            throw Error(ErrorCode::invalid_argument, "graph needs at least one node");
        }
        if (node_count > (std::size_t{1} << 31)) {
            throw Error(ErrorCode::invalid_argument, "node count too large");
        }
    }

    std::size_t node_count() const noexcept { return adjacency_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::size_t degree(AgentId i) const { return adjacency_.at(i).size(); }

    std::span<const AgentId> neighbors(AgentId i) const { return adjacency_.at(i); }
    std::span<const EdgeState> edges() const noexcept { return edges_; }
    std::span<EdgeState> edges() noexcept { return edges_; }
    EdgeState& edge(EdgeIndex e) { return edges_.at(e); }
    const EdgeState& edge(EdgeIndex e) const { return edges_.at(e); }

    std::optional<EdgeIndex> find_edge(AgentId a, AgentId b) const {
        if (a == b || a >= node_count() || b >= node_count()) return std::nullopt;
        const auto it = index_.find(key(a, b));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    bool has_edge(AgentId a, AgentId b) const { return find_edge(a, b).has_value(); }

    /// Adds {a, b} with survival weight q and a zero success count. An
    /// existing edge is left untouched and reported as a duplicate.
    EdgeInsert add_edge(AgentId a, AgentId b, double q = 1.0) {
        check_node(a);
        check_node(b);
        if (a == b) {
            throw Error(ErrorCode::self_loop_rejected, "self-loop at node " + std::to_string(a));
        }
        if (!(q > 0.0 && q <= 1.0)) {
            throw Error(ErrorCode::invalid_argument, "edge weight q must lie in (0, 1]");
        }
        const auto [it, inserted] = index_.try_emplace(key(a, b), edges_.size());
        if (!inserted) return EdgeInsert::duplicate;
        edges_.push_back(EdgeState{std::min(a, b), std::max(a, b), q, 0});
        adjacency_[a].push_back(b);
        adjacency_[b].push_back(a);
        return EdgeInsert::added;
    }

    bool remove_edge(AgentId a, AgentId b) {
        const auto found = find_edge(a, b);
        if (!found) return false;
        const EdgeIndex e = *found;
        index_.erase(key(a, b));
        if (e + 1 != edges_.size()) {
            edges_[e] = edges_.back();
            index_[key(edges_[e].a, edges_[e].b)] = e;
        }
        edges_.pop_back();
        erase_neighbor(a, b);
        erase_neighbor(b, a);
        return true;
    }

    /// Index of an edge drawn uniformly over all edges.
    EdgeIndex random_edge_index(Rng& rng) const {
        if (edges_.empty()) {
            throw Error(ErrorCode::empty_graph, "cannot sample an edge from an edgeless graph");
        }
        return rng.index(edges_.size());
    }

    /// Endpoints of a uniformly drawn edge; endpoints are therefore
    /// degree-biased.
    std::pair<AgentId, AgentId> random_edge(Rng& rng) const {
        const EdgeState& s = edges_[random_edge_index(rng)];
        return {s.a, s.b};
    }

    void reset_success_counts() noexcept {
        for (auto& s : edges_) s.n = 0;
    }

private:
    static std::uint64_t key(AgentId a, AgentId b) noexcept {
        const auto lo = static_cast<std::uint64_t>(std::min(a, b));
        const auto hi = static_cast<std::uint64_t>(std::max(a, b));
        return (lo << 32) | hi;
    }

    void check_node(AgentId i) const {
        if (i >= node_count()) {
            throw Error(ErrorCode::invalid_argument, "agent id " + std::to_string(i) + " out of range");
        }
    }

    void erase_neighbor(AgentId from, AgentId target) {
        auto& list = adjacency_[from];
        const auto it = std::find(list.begin(), list.end(), target);
        *it = list.back();
        list.pop_back();
    }

    std::vector<std::vector<AgentId>> adjacency_;
    std::vector<EdgeState> edges_;
    std::unordered_map<std::uint64_t, EdgeIndex> index_;
};

/// Disjoint sets with union by size and path halving.
class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1), sets_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t x, std::size_t y) {
        x = find(x);
        y = find(y);
        if (x == y) return false;
        if (size_[x] < size_[y]) std::swap(x, y);
        parent_[y] = x;
        size_[x] += size_[y];
        --sets_;
        return true;
    }

    std::size_t set_count() const noexcept { return sets_; }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
    std::size_t sets_;
};

/// Connected components as a partition of the agents. Blocks are sorted
/// internally and ordered by their smallest member; isolated nodes are
/// singleton blocks.
inline std::vector<std::vector<AgentId>> connected_components(const SocialGraph& g) {
    UnionFind uf(g.node_count());
    for (const auto& e : g.edges()) uf.unite(e.a, e.b);

    std::vector<std::vector<AgentId>> blocks;
    std::vector<std::size_t> block_of_root(g.node_count(), SIZE_MAX);
    for (AgentId i = 0; i < g.node_count(); ++i) {
        const std::size_t root = uf.find(i);
        if (block_of_root[root] == SIZE_MAX) {
            block_of_root[root] = blocks.size();
            blocks.emplace_back();
        }
        blocks[block_of_root[root]].push_back(i);
    }
    return blocks;
}

inline std::size_t component_count(const SocialGraph& g) {
    UnionFind uf(g.node_count());
    for (const auto& e : g.edges()) uf.unite(e.a, e.b);
    return uf.set_count();
}

}  // namespace tribesim
