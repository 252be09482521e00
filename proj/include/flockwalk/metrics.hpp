#pragma once

// Flocking scores: gathering (walkers per cluster), mobility (distinct nodes
// visited per walker) and sprawling (nodes per cluster).

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "flockwalk/engine.hpp"
#include "flockwalk/error.hpp"
#include "flockwalk/format.hpp"
#include "flockwalk/graph.hpp"

namespace flockwalk {

/// Maximal connected set of occupied nodes.
struct Cluster {
    std::vector<NodeId> nodes;  // ascending
    std::uint64_t walkers = 0;
};

/// Flood fill over occupied nodes. Clusters are ordered by their smallest node.
inline std::vector<Cluster> find_clusters(const DiscretizedGraph& g, std::span<const std::uint32_t> occupancy) {
    if (occupancy.size() != g.node_count()) throw ContractViolation("occupancy size does not match graph");
    std::vector<Cluster> clusters;
    std::vector<char> seen(g.node_count(), 0);
    std::vector<NodeId> stack;
    for (NodeId root = 0; root < g.node_count(); ++root) {
        if (occupancy[root] == 0 || seen[root]) continue;
        Cluster c;
        seen[root] = 1;
        stack.push_back(root);
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            c.nodes.push_back(v);
            c.walkers += occupancy[v];
            for (NodeId w : g.neighbors(v))
                if (occupancy[w] != 0 && !seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
        std::sort(c.nodes.begin(), c.nodes.end());
        clusters.push_back(std::move(c));
    }
    return clusters;
}

/// rho = |W| / number of clusters.
inline double gathering(std::span<const Cluster> clusters, std::size_t walkers) {
    if (walkers == 0) throw ConfigError("gathering is undefined without walkers");
    if (clusters.empty()) throw ConfigError("gathering needs at least one cluster");
    return static_cast<double>(walkers) / static_cast<double>(clusters.size());
}

/// sigma = occupied nodes / number of clusters.
inline double sprawling(std::span<const Cluster> clusters) {
    if (clusters.empty()) throw ConfigError("sprawling needs at least one cluster");
    std::size_t nodes = 0;
    for (const auto& c : clusters) nodes += c.nodes.size();
    return static_cast<double>(nodes) / static_cast<double>(clusters.size());
}

/// mu = mean number of distinct nodes visited, start node included.
inline double mobility(std::span<const VisitedSet> visited) {
    if (visited.empty()) throw ConfigError("mobility is undefined without walkers");
    std::uint64_t total = 0;
    for (const auto& v : visited) total += v.size();
    return static_cast<double>(total) / static_cast<double>(visited.size());
}

/// One recorded step. Scores that are ratios keep their integer parts so the
/// identities rho * clusters = walkers and sigma * clusters = groups stay exact.
struct MetricsSample {
    std::uint64_t t = 0;
    std::uint64_t walkers = 0;
    std::uint64_t groups = 0;    // occupied nodes g(t)
    std::uint64_t clusters = 0;
    std::uint64_t max_group = 0;
    std::uint64_t max_cluster_walkers = 0;
    std::uint64_t visited_total = 0;

    double rho() const { return static_cast<double>(walkers) / static_cast<double>(clusters); }
    double sigma() const { return static_cast<double>(groups) / static_cast<double>(clusters); }
    double mu() const { return static_cast<double>(visited_total) / static_cast<double>(walkers); }

    bool operator==(const MetricsSample&) const = default;
};

using MetricsSeries = std::vector<MetricsSample>;

inline MetricsSample sample_metrics(const DiscretizedGraph& g, const SimState& s) {
    const auto clusters = find_clusters(g, s.occupancy);
    MetricsSample m;
    m.t = s.t;
    m.walkers = s.walker_count();
    m.clusters = clusters.size();
    m.visited_total = s.visited_total;
    for (const auto& c : clusters) {
        m.groups += c.nodes.size();
        m.max_cluster_walkers = std::max(m.max_cluster_walkers, c.walkers);
        for (NodeId v : c.nodes) m.max_group = std::max<std::uint64_t>(m.max_group, s.occupancy[v]);
    }
    return m;
}

inline constexpr const char* kMetricsHeader = "t,rho,mu,sigma,groups,clusters,max_group,max_cluster_walkers";

inline void write_metrics_csv(std::ostream& out, const MetricsSeries& series) {
    out << kMetricsHeader << '\n';
    for (const auto& m : series)
        out << m.t << ',' << format_score(m.rho()) << ',' << format_score(m.mu()) << ',' << format_score(m.sigma())
            << ',' << m.groups << ',' << m.clusters << ',' << m.max_group << ',' << m.max_cluster_walkers << '\n';
}

}  // namespace flockwalk
