#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nibbledp/colour_set.hpp"
#include "nibbledp/correspondence.hpp"
#include "nibbledp/errors.hpp"
#include "nibbledp/graph.hpp"

namespace nibbledp {

/// Per-edge colour assignment; unset entries are still uncoloured.
struct Colouring {
    std::vector<std::optional<Colour>> colour;

    explicit Colouring(EdgeId edge_count = 0) : colour(edge_count) {}

    bool complete() const {
        for (const auto& c : colour)
            if (!c) return false;
        return true;
    }

    std::size_t assigned_count() const {
        std::size_t n = 0;
        for (const auto& c : colour)
            if (c) ++n;
        return n;
    }
};

/// Verdict from validate_colouring: ok, or the first violation found.
struct ColouringReport {
    bool ok = true;
    std::string detail;
};

/// Check a colouring against a correspondence by scanning every incident
/// pair's raw matching directly. Deliberately avoids partner() so it can
/// serve as an independent check on that query path. Requires all edges
/// coloured within the palette.
inline ColouringReport validate_colouring(const SimpleGraph& g, const EdgeCorrespondence& c,
                                          const Colouring& col) {
    ColouringReport r;
    if (col.colour.size() != g.edge_count()) {
        r.ok = false;
        r.detail = "colouring covers " + std::to_string(col.colour.size()) + " edges, graph has " +
                   std::to_string(g.edge_count());
        return r;
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (!col.colour[e]) {
            r.ok = false;
            r.detail = "edge " + std::to_string(e) + " is uncoloured";
            return r;
        }
        if (*col.colour[e] < 1 || *col.colour[e] > c.q()) {
            r.ok = false;
            r.detail = "edge " + std::to_string(e) + " has colour " + std::to_string(*col.colour[e]) +
                       " outside palette 1.." + std::to_string(c.q());
            return r;
        }
    }
    for (const auto& pr : c.incident_pairs()) {
        Colour ca = *col.colour[pr.first];
        Colour cb = *col.colour[pr.second];
        for (const auto& mp : c.matching(pr.first, pr.second)) {
            if (mp.first == ca && mp.second == cb) {
                r.ok = false;
                r.detail = "edges " + std::to_string(pr.first) + " and " + std::to_string(pr.second) +
                           " carry forbidden colour pair (" + std::to_string(ca) + "," +
                           std::to_string(cb) + ")";
                return r;
            }
        }
    }
    return r;
}

/// Like validate_colouring but uncoloured edges are allowed: only pairs with
/// both edges coloured are checked.
inline ColouringReport validate_partial_colouring(const SimpleGraph& g, const EdgeCorrespondence& c,
                                                  const Colouring& col) {
    ColouringReport r;
    if (col.colour.size() != g.edge_count()) {
        r.ok = false;
        r.detail = "colouring covers " + std::to_string(col.colour.size()) + " edges, graph has " +
                   std::to_string(g.edge_count());
        return r;
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (col.colour[e] && (*col.colour[e] < 1 || *col.colour[e] > c.q())) {
            r.ok = false;
            r.detail = "edge " + std::to_string(e) + " has colour " + std::to_string(*col.colour[e]) +
                       " outside palette 1.." + std::to_string(c.q());
            return r;
        }
    }
    for (const auto& pr : c.incident_pairs()) {
        if (!col.colour[pr.first] || !col.colour[pr.second]) continue;
        Colour ca = *col.colour[pr.first];
        Colour cb = *col.colour[pr.second];
        for (const auto& mp : c.matching(pr.first, pr.second)) {
            if (mp.first == ca && mp.second == cb) {
                r.ok = false;
                r.detail = "edges " + std::to_string(pr.first) + " and " + std::to_string(pr.second) +
                           " carry forbidden colour pair (" + std::to_string(ca) + "," +
                           std::to_string(cb) + ")";
                return r;
            }
        }
    }
    return r;
}

} // namespace nibbledp
