#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nibbledp/colour_set.hpp"
#include "nibbledp/colouring.hpp"
#include "nibbledp/correspondence.hpp"
#include "nibbledp/errors.hpp"
#include "nibbledp/graph.hpp"

namespace nibbledp {

/// Hard size limits for the exhaustive decision procedures. They exist so a
/// mistyped instance fails fast instead of burning hours; the search itself
/// is exact whenever it is allowed to run.
struct OracleLimits {
    EdgeId max_edges = 16;
    Colour max_q = 8;
};

struct OracleDecision {
    bool colourable = false;
    Colouring witness;
    std::uint64_t nodes = 0; // colour assignments tried
};

namespace detail {

/// Free edges ordered by how constrained they are: line-graph degree
/// descending, edge id ascending on ties.
inline std::vector<EdgeId> oracle_order(const SimpleGraph& g, const std::vector<EdgeId>& free_edges) {
    std::vector<std::pair<std::uint32_t, EdgeId>> keyed;
    keyed.reserve(free_edges.size());
    for (EdgeId e : free_edges) {
        const Edge& ed = g.edge(e);
        keyed.emplace_back(g.degree(ed.u) + g.degree(ed.v) - 2, e);
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first > y.first;
        return x.second < y.second;
    });
    std::vector<EdgeId> out;
    out.reserve(keyed.size());
    for (const auto& [k, e] : keyed) out.push_back(e);
    return out;
}

struct OracleSearch {
    const SimpleGraph& g;
    const EdgeCorrespondence& corr;
    std::vector<ColourSet> avail;
    std::vector<std::optional<Colour>>& assigned;
    std::vector<EdgeId> order;
    std::uint64_t nodes = 0;

    bool dfs(std::size_t depth) {
        if (depth == order.size()) return true;
        const EdgeId e = order[depth];
        for (Colour c = 1; c <= corr.q(); ++c) {
            if (!avail[e].test(c)) continue;
            ++nodes;
            assigned[e] = c;
            std::vector<std::pair<EdgeId, Colour>> undo;
            bool dead = false;
            const Edge& ed = g.edge(e);
            for (VertexId v : {ed.u, ed.v}) {
                for (EdgeId f : g.edges_at(v)) {
                    if (f == e || assigned[f]) continue;
                    const std::optional<Colour> part = corr.partner(e, c, f);
                    if (part && avail[f].test(*part)) {
                        avail[f].reset(*part);
                        undo.emplace_back(f, *part);
                        if (avail[f].empty()) {
                            dead = true;
                            break;
                        }
                    }
                }
                if (dead) break;
            }
            if (!dead && dfs(depth + 1)) return true;
            for (const auto& [f, pc] : undo) avail[f].set(pc);
            assigned[e] = std::nullopt;
        }
        return false;
    }
};

} // namespace detail

/// Decide by exhaustive search with forward checking whether the instance
/// admits a full colouring. Exact; refuses instances beyond the limits with
/// TooLarge.
inline OracleDecision oracle_colourable(const SimpleGraph& g, const EdgeCorrespondence& corr,
                                        const OracleLimits& limits = {}) {
    const CorrespondenceReport rep = validate_correspondence(g, corr);
    if (!rep.ok) throw Error(Err::invalid_correspondence, rep.detail);
    if (g.edge_count() > limits.max_edges) {
        throw Error(Err::too_large, "exhaustive search over " + std::to_string(g.edge_count()) +
                                        " edges, limit is " + std::to_string(limits.max_edges));
    }
    if (corr.q() > limits.max_q) {
        throw Error(Err::too_large, "exhaustive search over palette of " +
                                        std::to_string(corr.q()) + ", limit is " +
                                        std::to_string(limits.max_q));
    }

    OracleDecision d;
    d.witness = Colouring(g.edge_count());
    std::vector<EdgeId> all(g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e) all[e] = e;
    detail::OracleSearch search{g, corr, std::vector<ColourSet>(g.edge_count(), ColourSet(corr.q(), true)),
                                d.witness.colour, detail::oracle_order(g, all)};
    d.colourable = search.dfs(0);
    d.nodes = search.nodes;
    if (!d.colourable) d.witness = Colouring(g.edge_count());
    return d;
}

/// Decide whether a partial colouring extends to a full one. The partial must
/// itself be clean (InvalidPartial otherwise); only the uncoloured edges
/// count against the size limit.
inline OracleDecision oracle_completion(const SimpleGraph& g, const EdgeCorrespondence& corr,
                                        const Colouring& partial, const OracleLimits& limits = {}) {
    const CorrespondenceReport rep = validate_correspondence(g, corr);
    if (!rep.ok) throw Error(Err::invalid_correspondence, rep.detail);
    const ColouringReport prep = validate_partial_colouring(g, corr, partial);
    if (!prep.ok) throw Error(Err::invalid_partial, prep.detail);

    std::vector<EdgeId> free_edges;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (!partial.colour[e]) free_edges.push_back(e);
    }
    if (free_edges.size() > limits.max_edges) {
        throw Error(Err::too_large, "exhaustive completion over " +
                                        std::to_string(free_edges.size()) +
                                        " uncoloured edges, limit is " +
                                        std::to_string(limits.max_edges));
    }
    if (corr.q() > limits.max_q) {
        throw Error(Err::too_large, "exhaustive search over palette of " +
                                        std::to_string(corr.q()) + ", limit is " +
                                        std::to_string(limits.max_q));
    }

    OracleDecision d;
    d.witness = partial;
    std::vector<ColourSet> avail(g.edge_count(), ColourSet(corr.q(), true));
    for (EdgeId e : free_edges) {
        const Edge& ed = g.edge(e);
        for (VertexId v : {ed.u, ed.v}) {
            for (EdgeId f : g.edges_at(v)) {
                if (f == e || !partial.colour[f]) continue;
                const std::optional<Colour> banned = corr.partner(f, *partial.colour[f], e);
                if (banned) avail[e].reset(*banned);
            }
        }
    }
    detail::OracleSearch search{g, corr, std::move(avail), d.witness.colour,
                                detail::oracle_order(g, free_edges)};
    d.colourable = search.dfs(0);
    d.nodes = search.nodes;
    if (!d.colourable) d.witness = partial;
    return d;
}

/// Smallest palette size in 1..q_max for which build_for_q(q) yields a
/// colourable instance, or nullopt when none does. build_for_q must return a
/// correspondence for this graph with palette q.
template <typename Builder>
inline std::optional<Colour> oracle_min_q(const SimpleGraph& g, Builder&& build_for_q, Colour q_max,
                                          const OracleLimits& limits = {}) {
    for (Colour q = 1; q <= q_max; ++q) {
        const EdgeCorrespondence corr = build_for_q(q);
        if (oracle_colourable(g, corr, limits).colourable) return q;
    }
    return std::nullopt;
}

} // namespace nibbledp
