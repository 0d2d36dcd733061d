#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "nibbledp/errors.hpp"
#include "nibbledp/rng.hpp"

namespace nibbledp {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

/// Undirected edge with endpoints stored in ascending order.
struct Edge {
    VertexId u, v;

    VertexId other(VertexId w) const {
        if (w == u) return v;
        if (w == v) return u;
        throw Error(Err::not_an_endpoint,
                    "vertex " + std::to_string(w) + " is not an endpoint of this edge");
    }

    bool has(VertexId w) const { return w == u || w == v; }
};

/// Immutable simple graph. Edge ids follow the order edges were supplied in,
/// so instances and colourings can refer to edges by index.
class SimpleGraph {
  public:
    static SimpleGraph build(VertexId vertex_count,
                             const std::vector<std::array<VertexId, 2>>& edge_list) {
        SimpleGraph g;
        g.n_ = vertex_count;
        g.edges_.reserve(edge_list.size());
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(edge_list.size() * 2);
        for (const auto& e : edge_list) {
            VertexId a = e[0], b = e[1];
            if (a >= vertex_count || b >= vertex_count) {
                throw Error(Err::vertex_out_of_range,
                            "edge (" + std::to_string(a) + "," + std::to_string(b) +
                                ") references a vertex >= " + std::to_string(vertex_count));
            }
            if (a == b) {
                throw Error(Err::loop_edge, "loop at vertex " + std::to_string(a));
            }
            if (a > b) std::swap(a, b);
            std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
            if (!seen.insert(key).second) {
                throw Error(Err::duplicate_edge,
                            "edge (" + std::to_string(a) + "," + std::to_string(b) + ") repeated");
            }
            g.edges_.push_back(Edge{a, b});
        }
        g.build_incidence();
        return g;
    }

    VertexId vertex_count() const { return n_; }
    EdgeId edge_count() const { return static_cast<EdgeId>(edges_.size()); }
    const Edge& edge(EdgeId e) const { return edges_.at(e); }
    const std::vector<Edge>& edges() const { return edges_; }

    /// All edges containing v, ascending by edge id.
    const std::vector<EdgeId>& edges_at(VertexId v) const { return incidence_.at(v); }

    std::uint32_t degree(VertexId v) const { return static_cast<std::uint32_t>(incidence_.at(v).size()); }

    std::uint32_t max_degree() const { return max_degree_; }

    /// Edges sharing endpoint v with e, excluding e itself.
    std::vector<EdgeId> incident_edges(EdgeId e, VertexId v) const {
        const Edge& ed = edge(e);
        if (!ed.has(v)) {
            throw Error(Err::not_an_endpoint,
                        "vertex " + std::to_string(v) + " is not an endpoint of edge " + std::to_string(e));
        }
        std::vector<EdgeId> out;
        out.reserve(degree(v) > 0 ? degree(v) - 1 : 0);
        for (EdgeId f : edges_at(v)) {
            if (f != e) out.push_back(f);
        }
        return out;
    }

    /// True when e and f share an endpoint (e != f).
    bool incident(EdgeId e, EdgeId f) const {
        if (e == f) return false;
        const Edge& a = edge(e);
        const Edge& b = edge(f);
        return a.has(b.u) || a.has(b.v);
    }

    /// The shared endpoint of two incident edges. In a simple graph it is unique.
    VertexId shared_vertex(EdgeId e, EdgeId f) const {
        const Edge& a = edge(e);
        const Edge& b = edge(f);
        if (b.has(a.u)) return a.u;
        if (b.has(a.v)) return a.v;
        throw Error(Err::not_incident,
                    "edges " + std::to_string(e) + " and " + std::to_string(f) + " share no endpoint");
    }

  private:
    void build_incidence() {
        incidence_.assign(n_, {});
        for (EdgeId i = 0; i < edges_.size(); ++i) {
            incidence_[edges_[i].u].push_back(i);
            incidence_[edges_[i].v].push_back(i);
        }
        max_degree_ = 0;
        for (const auto& inc : incidence_) {
            max_degree_ = std::max(max_degree_, static_cast<std::uint32_t>(inc.size()));
        }
    }

    VertexId n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> incidence_;
    std::uint32_t max_degree_ = 0;
};

/// Cycle v0-v1-...-v(n-1)-v0; edge i joins v_i and v_(i+1 mod n).
inline SimpleGraph gen_cycle(VertexId n) {
    if (n < 3) throw Error(Err::invalid_size, "cycle needs at least 3 vertices, got " + std::to_string(n));
    std::vector<std::array<VertexId, 2>> edges;
    edges.reserve(n);
    for (VertexId i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n});
    return SimpleGraph::build(n, edges);
}

/// Complete graph K_n; edges in lexicographic endpoint order.
inline SimpleGraph gen_complete(VertexId n) {
    if (n < 1) throw Error(Err::invalid_size, "complete graph needs at least 1 vertex");
    std::vector<std::array<VertexId, 2>> edges;
    for (VertexId u = 0; u < n; ++u) {
        for (VertexId v = u + 1; v < n; ++v) edges.push_back({u, v});
    }
    return SimpleGraph::build(n, edges);
}

/// Random simple graph with maximum degree at most degree_cap: candidate pairs
/// are visited in a seeded shuffled order and greedily added while both
/// endpoints have spare degree. Deterministic for a given (n, degree_cap, seed).
inline SimpleGraph gen_random_max_degree(VertexId n, std::uint32_t degree_cap, std::uint64_t seed) {
    if (n < 1) throw Error(Err::invalid_size, "graph needs at least 1 vertex");
    std::vector<std::array<VertexId, 2>> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (VertexId u = 0; u < n; ++u) {
        for (VertexId v = u + 1; v < n; ++v) pairs.push_back({u, v});
    }
    Stream s = Stream::derive(seed, {purpose_tag(StreamPurpose::graph_gen), n, degree_cap});
    s.shuffle(pairs.data(), pairs.size());
    std::vector<std::uint32_t> deg(n, 0);
    std::vector<std::array<VertexId, 2>> edges;
    for (const auto& p : pairs) {
        if (deg[p[0]] < degree_cap && deg[p[1]] < degree_cap) {
            ++deg[p[0]];
            ++deg[p[1]];
            edges.push_back(p);
        }
    }
    return SimpleGraph::build(n, edges);
}

} // namespace nibbledp
