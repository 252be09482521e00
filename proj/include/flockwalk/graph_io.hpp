#pragma once

// Text formats for street networks.
//
// Raw edge list ('#' starts a comment, blank lines ignored):
//   N <count>
//   node <id> <x> <y>          (count lines)
//   E <count>
//   edge <u> <v> <length_m>    (count lines)
//
// Discretized cache: a `delta <value>` line, then the same N/E blocks over the
// dense node ids, then one `prov <node> <raw_edge_index> <position>` line per
// node. Original intersections are written as `prov <node> -1 <original_id>`.
// Doubles are written in shortest round-trip form, so a loaded cache compares
// equal to the graph that was saved.

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>

#include "flockwalk/error.hpp"
#include "flockwalk/format.hpp"
#include "flockwalk/graph.hpp"

namespace flockwalk {

namespace detail {

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    /// Next line with at least one token; false at end of input.
    bool next(std::vector<std::string_view>& tokens) {
        while (std::getline(in_, buffer_)) {
            ++line_;
            tokens = tokenize(buffer_);
            if (!tokens.empty()) return true;
        }
        return false;
    }

    std::size_t line() const noexcept { return line_; }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

    template <class T>
    T number(std::string_view token, const char* what) const {
        const auto v = parse_number<T>(token);
        if (!v) fail(std::string("bad ") + what + " '" + std::string(token) + "'");
        return *v;
    }

    void expect(std::vector<std::string_view>& tokens, std::string_view keyword, std::size_t arity) {
        if (!next(tokens)) fail("unexpected end of file, expected '" + std::string(keyword) + "'");
        if (tokens[0] != keyword) fail("expected '" + std::string(keyword) + "', got '" + std::string(tokens[0]) + "'");
        if (tokens.size() != arity + 1)
            fail("'" + std::string(keyword) + "' takes " + std::to_string(arity) + " fields");
    }

private:
    std::istream& in_;
    std::string buffer_;
    std::size_t line_ = 0;
};

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return in;
}

}  // namespace detail

inline RawStreetNetwork parse_raw(std::istream& in) {
    detail::LineReader reader(in);
    std::vector<std::string_view> tok;
    RawStreetNetwork net;

    reader.expect(tok, "N", 1);
    const auto n = reader.number<std::size_t>(tok[1], "node count");
    std::unordered_set<std::int64_t> ids;
    net.nodes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        reader.expect(tok, "node", 3);
        RawStreetNetwork::Node node{reader.number<std::int64_t>(tok[1], "node id"),
                                    reader.number<double>(tok[2], "x"), reader.number<double>(tok[3], "y")};
        if (!ids.insert(node.id).second) reader.fail("duplicate node id " + std::to_string(node.id));
        net.nodes.push_back(node);
    }

    reader.expect(tok, "E", 1);
    const auto m = reader.number<std::size_t>(tok[1], "edge count");
    net.edges.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        reader.expect(tok, "edge", 3);
        RawStreetNetwork::Edge edge{reader.number<std::int64_t>(tok[1], "endpoint"),
                                    reader.number<std::int64_t>(tok[2], "endpoint"),
                                    reader.number<double>(tok[3], "length")};
        if (!(edge.length > 0.0) || !std::isfinite(edge.length)) reader.fail("length must be positive");
        if (!ids.count(edge.u) || !ids.count(edge.v))
            throw ReferenceError("line " + std::to_string(reader.line()) + ": edge references unknown node " +
                                 std::to_string(ids.count(edge.u) ? edge.v : edge.u));
        net.edges.push_back(edge);
    }
    if (reader.next(tok)) reader.fail("unexpected trailing content '" + std::string(tok[0]) + "'");
    return net;
}

inline RawStreetNetwork load_raw(const std::string& path) {
    auto in = detail::open_input(path);
    return parse_raw(in);
}

inline void write_raw(std::ostream& out, const RawStreetNetwork& net) {
    out << "N " << net.nodes.size() << '\n';
    for (const auto& n : net.nodes)
        out << "node " << n.id << ' ' << format_exact(n.x) << ' ' << format_exact(n.y) << '\n';
    out << "E " << net.edges.size() << '\n';
    for (const auto& e : net.edges) out << "edge " << e.u << ' ' << e.v << ' ' << format_exact(e.length) << '\n';
}

inline void write_cache(std::ostream& out, const DiscretizedGraph& g) {
    out << "# flockwalk " << kVersion << " discretized graph\n";
    out << "delta " << format_exact(g.delta()) << '\n';
    out << "N " << g.node_count() << '\n';
    for (NodeId v = 0; v < g.node_count(); ++v)
        out << "node " << v << ' ' << format_exact(g.coords()[v].x) << ' ' << format_exact(g.coords()[v].y) << '\n';
    const auto links = g.links();
    out << "E " << links.size() << '\n';
    for (const auto& l : links) out << "edge " << l.u << ' ' << l.v << ' ' << format_exact(l.length) << '\n';
    for (NodeId v = 0; v < g.node_count(); ++v)
        out << "prov " << v << ' ' << g.provenance()[v].edge << ' ' << g.provenance()[v].position << '\n';
}

inline DiscretizedGraph parse_cache(std::istream& in) {
    detail::LineReader reader(in);
    std::vector<std::string_view> tok;

    reader.expect(tok, "delta", 1);
    const auto delta = reader.number<double>(tok[1], "delta");

    reader.expect(tok, "N", 1);
    const auto n = reader.number<std::size_t>(tok[1], "node count");
    std::vector<Point> coords(n);
    for (std::size_t i = 0; i < n; ++i) {
        reader.expect(tok, "node", 3);
        if (reader.number<std::size_t>(tok[1], "node id") != i) reader.fail("cache nodes must be numbered 0..N-1 in order");
        coords[i] = {reader.number<double>(tok[2], "x"), reader.number<double>(tok[3], "y")};
    }

    reader.expect(tok, "E", 1);
    const auto m = reader.number<std::size_t>(tok[1], "edge count");
    std::vector<DiscretizedGraph::Link> links(m);
    for (std::size_t i = 0; i < m; ++i) {
        reader.expect(tok, "edge", 3);
        const auto u = reader.number<std::size_t>(tok[1], "endpoint");
        const auto v = reader.number<std::size_t>(tok[2], "endpoint");
        if (u >= n || v >= n) throw ReferenceError("line " + std::to_string(reader.line()) + ": edge endpoint out of range");
        links[i] = {static_cast<NodeId>(u), static_cast<NodeId>(v), reader.number<double>(tok[3], "length")};
    }

    std::vector<Provenance> provenance(n);
    std::vector<char> seen(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        reader.expect(tok, "prov", 3);
        const auto v = reader.number<std::size_t>(tok[1], "node");
        if (v >= n || seen[v]) reader.fail("bad or repeated provenance node");
        seen[v] = 1;
        provenance[v] = {reader.number<std::int64_t>(tok[2], "edge index"),
                         reader.number<std::int64_t>(tok[3], "position")};
    }
    if (reader.next(tok)) reader.fail("unexpected trailing content '" + std::string(tok[0]) + "'");
    return DiscretizedGraph::from_links(n, links, std::move(coords), std::move(provenance), delta);
}

inline void save_cache(const std::string& path, const DiscretizedGraph& g) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_cache(out, g);
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline DiscretizedGraph load_cache(const std::string& path) {
    auto in = detail::open_input(path);
    return parse_cache(in);
}

/// True when the first meaningful line of the file is a `delta` header.
inline bool is_cache_file(const std::string& path) {
    auto in = detail::open_input(path);
    detail::LineReader reader(in);
    std::vector<std::string_view> tok;
    return reader.next(tok) && tok[0] == "delta";
}

/// Loads either format; raw networks are discretized with `delta`.
inline DiscretizedGraph load_graph(const std::string& path, double delta = kDefaultDelta) {
    if (is_cache_file(path)) return load_cache(path);
    return discretize(load_raw(path), delta);
}

}  // namespace flockwalk
