#pragma once

// Street networks: raw intersection/segment graphs, edge discretization into
// ~delta-length links, synthetic substrates, and the CSR adjacency the
// simulation runs on.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "flockwalk/error.hpp"

namespace flockwalk {

using NodeId = std::uint32_t;
/// Dense id of one orientation of an undirected link (an index into the CSR adjacency array).
using SlotId = std::uint32_t;

inline constexpr double kDefaultDelta = 10.0;

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

/// Street network as extracted from map data. Undirected, multigraph allowed.
struct RawStreetNetwork {
    struct Node {
        std::int64_t id = 0;
        double x = 0.0;
        double y = 0.0;
    };
    struct Edge {
        std::int64_t u = 0;
        std::int64_t v = 0;
        double length = 0.0;  // meters
    };

    std::vector<Node> nodes;
    std::vector<Edge> edges;
};

/// Where a discretized node came from: an original intersection or the
/// `position`-th interior point (1..k-1) of raw edge `edge`.
struct Provenance {
    std::int64_t edge = -1;      // raw edge index, -1 for an original node
    std::int64_t position = 0;   // interior index, or the original node id
    bool is_original() const noexcept { return edge < 0; }
    bool operator==(const Provenance&) const = default;
};

struct DiscretizeReport {
    std::size_t self_loops = 0;
    std::size_t duplicate_edges = 0;
    std::size_t dropped_nodes = 0;  // original nodes outside the largest component
    std::size_t dropped_edges = 0;  // surviving edges outside the largest component
};

/// Number of links a street of length `length` is cut into: ceil(length / delta).
/// Quotients within 1e-9 (relative) of an integer are snapped so that e.g. 1.1/0.1 gives 11.
inline std::size_t segment_count(double length, double delta) {
    const double q = length / delta;
    const double r = std::round(q);
    if (std::abs(q - r) <= 1e-9 * std::max(1.0, q)) return std::max<std::size_t>(1, static_cast<std::size_t>(r));
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(q)));
}

/// Immutable simple undirected graph in CSR form.
///
/// Neighbor lists are sorted ascending, so the structure is a canonical function
/// of its link set. Every undirected link {v,w} owns two slots, v->w in v's row
/// and w->v in w's row; `reverse()` maps one to the other.
class DiscretizedGraph {
public:
    struct Link {
        NodeId u = 0;
        NodeId v = 0;
        double length = 1.0;
    };

    DiscretizedGraph() = default;

    /// Builds and validates: endpoints in range, no self-loops, no duplicate
    /// links, every node has degree >= 1, connected.
    static DiscretizedGraph from_links(std::size_t node_count, std::span<const Link> links,
                                       std::vector<Point> coords = {},
                                       std::vector<Provenance> provenance = {}, double delta = 1.0) {
        if (node_count < 2) throw ConfigError("graph needs at least 2 nodes");
        if (node_count >= std::numeric_limits<NodeId>::max())
            throw ConfigError("graph too large for 32-bit node ids");
        if (links.size() * 2 >= std::numeric_limits<SlotId>::max())
            throw ConfigError("graph too large for 32-bit link ids");

        DiscretizedGraph g;
        g.delta_ = delta;
        g.offsets_.assign(node_count + 1, 0);
        for (const Link& l : links) {
            if (l.u >= node_count || l.v >= node_count) throw ConfigError("link endpoint out of range");
            if (l.u == l.v) throw ConfigError("self-loop at node " + std::to_string(l.u));
            ++g.offsets_[l.u + 1];
            ++g.offsets_[l.v + 1];
        }
        std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());

        const std::size_t slots = links.size() * 2;
        std::vector<std::pair<NodeId, double>> rows(slots);
        std::vector<SlotId> fill(g.offsets_.begin(), g.offsets_.end() - 1);
        for (const Link& l : links) {
            rows[fill[l.u]++] = {l.v, l.length};
            rows[fill[l.v]++] = {l.u, l.length};
        }

        g.targets_.resize(slots);
        g.sources_.resize(slots);
        g.lengths_.resize(slots);
        for (NodeId v = 0; v < node_count; ++v) {
            const auto first = rows.begin() + g.offsets_[v];
            const auto last = rows.begin() + g.offsets_[v + 1];
            if (first == last) throw ConfigError("node " + std::to_string(v) + " has degree 0");
            std::sort(first, last, [](const auto& a, const auto& b) { return a.first < b.first; });
            for (SlotId s = g.offsets_[v]; s < g.offsets_[v + 1]; ++s) {
                if (s > g.offsets_[v] && rows[s].first == rows[s - 1].first)
                    throw ConfigError("duplicate link " + std::to_string(v) + "-" + std::to_string(rows[s].first));
                g.targets_[s] = rows[s].first;
                g.sources_[s] = v;
                g.lengths_[s] = rows[s].second;
            }
        }

        g.reverse_.resize(slots);
        for (SlotId s = 0; s < slots; ++s) g.reverse_[s] = *g.find_slot(g.targets_[s], g.sources_[s]);

        if (!coords.empty() && coords.size() != node_count) throw ConfigError("coordinate count mismatch");
        if (!provenance.empty() && provenance.size() != node_count) throw ConfigError("provenance count mismatch");
        g.coords_ = coords.empty() ? std::vector<Point>(node_count) : std::move(coords);
        if (provenance.empty()) {
            provenance.resize(node_count);
            for (NodeId v = 0; v < node_count; ++v) provenance[v] = {-1, static_cast<std::int64_t>(v)};
        }
        g.provenance_ = std::move(provenance);

        if (g.component_sizes().size() != 1) throw ConfigError("graph is not connected");
        return g;
    }

    std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    /// Undirected link count M.
    std::size_t link_count() const noexcept { return targets_.size() / 2; }
    std::size_t slot_count() const noexcept { return targets_.size(); }

    std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
    std::span<const NodeId> neighbors(NodeId v) const {
        return {targets_.data() + offsets_[v], degree(v)};
    }
    SlotId first_slot(NodeId v) const { return offsets_[v]; }
    SlotId end_slot(NodeId v) const { return offsets_[v + 1]; }

    NodeId slot_source(SlotId s) const { return sources_[s]; }
    NodeId slot_target(SlotId s) const { return targets_[s]; }
    SlotId reverse(SlotId s) const { return reverse_[s]; }
    double slot_length(SlotId s) const { return lengths_[s]; }

    /// Slot of the directed link v->w, if w is a neighbor of v.
    std::optional<SlotId> find_slot(NodeId v, NodeId w) const {
        if (v >= node_count()) return std::nullopt;
        const auto first = targets_.begin() + offsets_[v];
        const auto last = targets_.begin() + offsets_[v + 1];
        const auto it = std::lower_bound(first, last, w);
        if (it == last || *it != w) return std::nullopt;
        return static_cast<SlotId>(it - targets_.begin());
    }
    bool adjacent(NodeId v, NodeId w) const { return find_slot(v, w).has_value(); }

    /// Each undirected link once, u < v, ordered by (u, v).
    std::vector<Link> links() const {
        std::vector<Link> out;
        out.reserve(link_count());
        for (SlotId s = 0; s < slot_count(); ++s)
            if (sources_[s] < targets_[s]) out.push_back({sources_[s], targets_[s], lengths_[s]});
        return out;
    }

    const std::vector<Point>& coords() const noexcept { return coords_; }
    const std::vector<Provenance>& provenance() const noexcept { return provenance_; }
    double delta() const noexcept { return delta_; }
    const DiscretizeReport& report() const noexcept { return report_; }
    void set_report(const DiscretizeReport& r) { report_ = r; }

    /// Sizes of connected components, in order of their smallest node.
    std::vector<std::size_t> component_sizes() const {
        std::vector<std::size_t> sizes;
        std::vector<char> seen(node_count(), 0);
        std::vector<NodeId> stack;
        for (NodeId root = 0; root < node_count(); ++root) {
            if (seen[root]) continue;
            std::size_t size = 0;
            seen[root] = 1;
            stack.push_back(root);
            while (!stack.empty()) {
                const NodeId v = stack.back();
                stack.pop_back();
                ++size;
                for (NodeId w : neighbors(v))
                    if (!seen[w]) {
                        seen[w] = 1;
                        stack.push_back(w);
                    }
            }
            sizes.push_back(size);
        }
        return sizes;
    }

    /// Topology, lengths, coordinates, provenance and delta all equal.
    bool operator==(const DiscretizedGraph& o) const {
        return offsets_ == o.offsets_ && targets_ == o.targets_ && lengths_ == o.lengths_ &&
               coords_ == o.coords_ && provenance_ == o.provenance_ && delta_ == o.delta_;
    }

private:
    std::vector<SlotId> offsets_;
    std::vector<NodeId> targets_;
    std::vector<NodeId> sources_;
    std::vector<SlotId> reverse_;
    std::vector<double> lengths_;
    std::vector<Point> coords_;
    std::vector<Provenance> provenance_;
    double delta_ = 1.0;
    DiscretizeReport report_;
};

/// Splits every street of length L into ceil(L/delta) links through evenly
/// spaced interior nodes and keeps the largest connected component.
///
/// Self-loops are dropped. Parallel streets stay distinct when they are cut
/// into >= 2 links; parallel single-link streets collapse to one link.
/// Original nodes come first (in input order), then interior nodes edge by edge.
inline DiscretizedGraph discretize(const RawStreetNetwork& raw, double delta = kDefaultDelta) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("delta must be a positive number");
    if (raw.nodes.empty()) throw ConfigError("empty network");

    std::unordered_map<std::int64_t, std::size_t> index;
    index.reserve(raw.nodes.size());
    for (std::size_t i = 0; i < raw.nodes.size(); ++i)
        if (!index.emplace(raw.nodes[i].id, i).second)
            throw ConfigError("duplicate node id " + std::to_string(raw.nodes[i].id));

    struct Kept {
        std::size_t edge;  // raw edge index
        std::size_t a, b;  // raw node indices
        std::size_t k;
    };
    DiscretizeReport report;
    std::vector<Kept> kept;
    std::unordered_set<std::uint64_t> single_links;
    for (std::size_t e = 0; e < raw.edges.size(); ++e) {
        const auto& edge = raw.edges[e];
        const auto iu = index.find(edge.u);
        const auto iv = index.find(edge.v);
        if (iu == index.end() || iv == index.end())
            throw ReferenceError("edge " + std::to_string(e) + " references an unknown node");
        if (!(edge.length > 0.0) || !std::isfinite(edge.length))
            throw ConfigError("edge " + std::to_string(e) + " has a non-positive length");
        if (iu->second == iv->second) {
            ++report.self_loops;
            continue;
        }
        const std::size_t k = segment_count(edge.length, delta);
        if (k == 1) {
            const auto lo = std::min(iu->second, iv->second);
            const auto hi = std::max(iu->second, iv->second);
            if (!single_links.insert((static_cast<std::uint64_t>(lo) << 32) | hi).second) {
                ++report.duplicate_edges;
                continue;
            }
        }
        kept.push_back({e, iu->second, iv->second, k});
    }

    // Union-find over original nodes.
    std::vector<std::size_t> parent(raw.nodes.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Kept& e : kept) {
        const auto ra = find(e.a), rb = find(e.b);
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }

    // Component weight = discretized node count; ties go to the component seen first.
    std::vector<std::size_t> weight(raw.nodes.size(), 0);
    std::vector<std::size_t> edge_count(raw.nodes.size(), 0);
    for (std::size_t i = 0; i < raw.nodes.size(); ++i) ++weight[find(i)];
    for (const Kept& e : kept) {
        weight[find(e.a)] += e.k - 1;
        ++edge_count[find(e.a)];
    }
    std::size_t best = find(0);
    for (std::size_t i = 0; i < raw.nodes.size(); ++i)
        if (find(i) == i && weight[i] > weight[best]) best = i;
    if (edge_count[best] == 0) throw ConfigError("all components are trivial (no usable edges)");

    std::vector<NodeId> dense(raw.nodes.size(), std::numeric_limits<NodeId>::max());
    std::vector<Point> coords;
    std::vector<Provenance> provenance;
    for (std::size_t i = 0; i < raw.nodes.size(); ++i) {
        if (find(i) != best) {
            ++report.dropped_nodes;
            continue;
        }
        dense[i] = static_cast<NodeId>(coords.size());
        coords.push_back({raw.nodes[i].x, raw.nodes[i].y});
        provenance.push_back({-1, raw.nodes[i].id});
    }

    std::vector<DiscretizedGraph::Link> links;
    for (const Kept& e : kept) {
        if (find(e.a) != best) {
            ++report.dropped_edges;
            continue;
        }
        const auto& na = raw.nodes[e.a];
        const auto& nb = raw.nodes[e.b];
        const double piece = raw.edges[e.edge].length / static_cast<double>(e.k);
        NodeId prev = dense[e.a];
        for (std::size_t j = 1; j < e.k; ++j) {
            const double f = static_cast<double>(j) / static_cast<double>(e.k);
            const auto id = static_cast<NodeId>(coords.size());
            coords.push_back({na.x + (nb.x - na.x) * f, na.y + (nb.y - na.y) * f});
            provenance.push_back({static_cast<std::int64_t>(e.edge), static_cast<std::int64_t>(j)});
            links.push_back({prev, id, piece});
            prev = id;
        }
        links.push_back({prev, dense[e.b], piece});
    }

    const std::size_t n = coords.size();
    auto g = DiscretizedGraph::from_links(n, links, std::move(coords), std::move(provenance), delta);
    g.set_report(report);
    return g;
}

/// Path graph 0-1-...-(n-1).
inline DiscretizedGraph make_line(std::size_t n) {
    if (n < 2) throw ConfigError("line needs at least 2 nodes");
    std::vector<DiscretizedGraph::Link> links;
    std::vector<Point> coords;
    for (std::size_t i = 0; i < n; ++i) coords.push_back({static_cast<double>(i), 0.0});
    for (std::size_t i = 0; i + 1 < n; ++i) links.push_back({NodeId(i), NodeId(i + 1), 1.0});
    return DiscretizedGraph::from_links(n, links, std::move(coords));
}

/// Cycle C_n.
inline DiscretizedGraph make_cycle(std::size_t n) {
    if (n < 3) throw ConfigError("cycle needs at least 3 nodes");
    std::vector<DiscretizedGraph::Link> links;
    std::vector<Point> coords;
    const double pi = std::acos(-1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2.0 * pi * static_cast<double>(i) / static_cast<double>(n);
        coords.push_back({std::cos(a), std::sin(a)});
        links.push_back({NodeId(i), NodeId((i + 1) % n), 1.0});
    }
    return DiscretizedGraph::from_links(n, links, std::move(coords));
}

/// w x h 4-neighbor lattice; node (x, y) has id y*w + x.
inline DiscretizedGraph make_grid(std::size_t w, std::size_t h) {
    if (w < 2 || h < 2) throw ConfigError("grid needs width and height >= 2");
    std::vector<DiscretizedGraph::Link> links;
    std::vector<Point> coords;
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
            const auto id = static_cast<NodeId>(y * w + x);
            coords.push_back({static_cast<double>(x), static_cast<double>(y)});
            if (x + 1 < w) links.push_back({id, id + 1, 1.0});
            if (y + 1 < h) links.push_back({id, static_cast<NodeId>(id + w), 1.0});
        }
    return DiscretizedGraph::from_links(w * h, links, std::move(coords));
}

struct DegreeStats {
    std::size_t min = 0;
    std::size_t max = 0;
    double mean = 0.0;
    std::vector<std::size_t> histogram;  // histogram[d] = nodes of degree d
};

inline DegreeStats degree_stats(const DiscretizedGraph& g) {
    DegreeStats s;
    if (g.node_count() == 0) return s;
    s.min = std::numeric_limits<std::size_t>::max();
    for (NodeId v = 0; v < g.node_count(); ++v) {
        const auto d = g.degree(v);
        s.min = std::min(s.min, d);
        s.max = std::max(s.max, d);
        if (s.histogram.size() <= d) s.histogram.resize(d + 1, 0);
        ++s.histogram[d];
    }
    s.mean = static_cast<double>(g.slot_count()) / static_cast<double>(g.node_count());
    return s;
}

}  // namespace flockwalk
