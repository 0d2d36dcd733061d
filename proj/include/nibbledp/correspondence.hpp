#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "nibbledp/colour_set.hpp"
#include "nibbledp/errors.hpp"
#include "nibbledp/graph.hpp"
#include "nibbledp/rng.hpp"

namespace nibbledp {

/// One colour-pair constraint between an incident edge pair: if the lower
/// edge gets `first` and the higher edge gets `second`, the colouring is bad.
using MatchPair = std::pair<Colour, Colour>;

/// Raw matching for one incident edge pair, as read from or written to files.
struct RawMatching {
    EdgeId edge_a, edge_b; // edge_a < edge_b
    std::vector<MatchPair> pairs;
};

/// Constraint system over all incident edge pairs of a graph. Each pair
/// carries a partial matching between the two edges' palettes: every colour
/// appears at most once on each side. The matching for (a,b) is stored once in
/// a canonical orientation (smaller edge id first); queries from the higher
/// edge's side read it in reverse.
class EdgeCorrespondence {
  public:
    /// Build from explicit matchings. Pairs not mentioned get an empty
    /// matching. Rejects matchings on non-incident pairs, out-of-range
    /// colours, and repeated first or second elements.
    static EdgeCorrespondence build(const SimpleGraph& g, Colour q,
                                    const std::vector<RawMatching>& matchings) {
        EdgeCorrespondence c = skeleton(g, q);
        for (const auto& rm : matchings) {
            if (rm.edge_a >= rm.edge_b) {
                throw Error(Err::invalid_correspondence,
                            "matching must list the smaller edge id first, got (" +
                                std::to_string(rm.edge_a) + "," + std::to_string(rm.edge_b) + ")");
            }
            auto it = c.index_.find(pair_key(rm.edge_a, rm.edge_b));
            if (it == c.index_.end()) {
                throw Error(Err::not_incident,
                            "edges " + std::to_string(rm.edge_a) + " and " + std::to_string(rm.edge_b) +
                                " are not incident");
            }
            c.set_pairs(it->second, rm.pairs);
        }
        return c;
    }

    /// Diagnostic back door: store matchings without the matching-shape checks
    /// (incidence and ranges are still enforced). Lets tests and the validator
    /// exercise InvalidCorrespondence reporting on hand-built bad input.
    static EdgeCorrespondence build_unchecked(const SimpleGraph& g, Colour q,
                                              const std::vector<RawMatching>& matchings) {
        EdgeCorrespondence c = skeleton(g, q);
        for (const auto& rm : matchings) {
            auto it = c.index_.find(pair_key(std::min(rm.edge_a, rm.edge_b), std::max(rm.edge_a, rm.edge_b)));
            if (it == c.index_.end()) {
                throw Error(Err::not_incident, "matching on non-incident pair");
            }
            c.entries_[it->second].fwd = rm.pairs;
            std::sort(c.entries_[it->second].fwd.begin(), c.entries_[it->second].fwd.end());
            c.rebuild_rev(it->second);
        }
        return c;
    }

    Colour q() const { return q_; }
    EdgeId edge_count() const { return edge_count_; }

    /// Number of incident edge pairs in the underlying graph.
    std::size_t pair_count() const { return entries_.size(); }

    bool pairs_incident(EdgeId e, EdgeId f) const {
        if (e == f) return false;
        return index_.count(pair_key(std::min(e, f), std::max(e, f))) != 0;
    }

    /// The colour forbidden on f when e gets c, if any. O(log q).
    std::optional<Colour> partner(EdgeId e, Colour c, EdgeId f) const {
        if (e == f) throw Error(Err::not_incident, "partner queried for an edge against itself");
        auto it = index_.find(pair_key(std::min(e, f), std::max(e, f)));
        if (it == index_.end()) {
            throw Error(Err::not_incident,
                        "edges " + std::to_string(e) + " and " + std::to_string(f) + " are not incident");
        }
        const Entry& entry = entries_[it->second];
        const auto& table = (e < f) ? entry.fwd : entry.rev;
        auto pos = std::lower_bound(table.begin(), table.end(), MatchPair{c, 0});
        if (pos != table.end() && pos->first == c) return pos->second;
        return std::nullopt;
    }

    /// Canonical matching for an incident pair, oriented smaller-id-first.
    const std::vector<MatchPair>& matching(EdgeId a, EdgeId b) const {
        if (a >= b) throw Error(Err::domain_error, "matching() takes the smaller edge id first");
        auto it = index_.find(pair_key(a, b));
        if (it == index_.end()) {
            throw Error(Err::not_incident,
                        "edges " + std::to_string(a) + " and " + std::to_string(b) + " are not incident");
        }
        return entries_[it->second].fwd;
    }

    /// All incident pairs (a < b), ascending lexicographically.
    const std::vector<std::pair<EdgeId, EdgeId>>& incident_pairs() const { return pair_ids_; }

    /// Canonical serialisable form: non-empty matchings in pair order.
    std::vector<RawMatching> to_raw() const {
        std::vector<RawMatching> out;
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (!entries_[i].fwd.empty()) {
                out.push_back(RawMatching{pair_ids_[i].first, pair_ids_[i].second, entries_[i].fwd});
            }
        }
        return out;
    }

  private:
    struct Entry {
        std::vector<MatchPair> fwd; // (lower-edge colour, higher-edge colour), sorted by first
        std::vector<MatchPair> rev; // (higher-edge colour, lower-edge colour), sorted by first
    };

    static std::uint64_t pair_key(EdgeId a, EdgeId b) {
        return (static_cast<std::uint64_t>(a) << 32) | b;
    }

    static EdgeCorrespondence skeleton(const SimpleGraph& g, Colour q) {
        if (q < 1) throw Error(Err::invalid_size, "palette must have at least one colour");
        EdgeCorrespondence c;
        c.q_ = q;
        c.edge_count_ = g.edge_count();
        for (VertexId v = 0; v < g.vertex_count(); ++v) {
            const auto& inc = g.edges_at(v);
            for (std::size_t i = 0; i < inc.size(); ++i) {
                for (std::size_t j = i + 1; j < inc.size(); ++j) {
                    EdgeId a = std::min(inc[i], inc[j]);
                    EdgeId b = std::max(inc[i], inc[j]);
                    c.pair_ids_.emplace_back(a, b);
                }
            }
        }
        std::sort(c.pair_ids_.begin(), c.pair_ids_.end());
        c.entries_.resize(c.pair_ids_.size());
        c.index_.reserve(c.pair_ids_.size() * 2);
        for (std::size_t i = 0; i < c.pair_ids_.size(); ++i) {
            c.index_.emplace(pair_key(c.pair_ids_[i].first, c.pair_ids_[i].second),
                             static_cast<std::uint32_t>(i));
        }
        return c;
    }

    void set_pairs(std::uint32_t entry_idx, const std::vector<MatchPair>& pairs) {
        ColourSet firsts(q_), seconds(q_);
        for (const auto& p : pairs) {
            if (p.first < 1 || p.first > q_ || p.second < 1 || p.second > q_) {
                throw Error(Err::invalid_correspondence,
                            "matching pair (" + std::to_string(p.first) + "," + std::to_string(p.second) +
                                ") outside palette 1.." + std::to_string(q_));
            }
            if (firsts.test(p.first)) {
                throw Error(Err::invalid_correspondence,
                            "colour " + std::to_string(p.first) + " repeated as first element");
            }
            if (seconds.test(p.second)) {
                throw Error(Err::invalid_correspondence,
                            "colour " + std::to_string(p.second) + " repeated as second element");
            }
            firsts.set(p.first);
            seconds.set(p.second);
        }
        entries_[entry_idx].fwd = pairs;
        std::sort(entries_[entry_idx].fwd.begin(), entries_[entry_idx].fwd.end());
        rebuild_rev(entry_idx);
    }

    void rebuild_rev(std::uint32_t entry_idx) {
        Entry& e = entries_[entry_idx];
        e.rev.clear();
        e.rev.reserve(e.fwd.size());
        for (const auto& p : e.fwd) e.rev.emplace_back(p.second, p.first);
        std::sort(e.rev.begin(), e.rev.end());
    }

    Colour q_ = 0;
    EdgeId edge_count_ = 0;
    std::vector<std::pair<EdgeId, EdgeId>> pair_ids_;
    std::vector<Entry> entries_;
    std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

/// Every incident pair forbids equal colours: ordinary proper edge colouring.
inline EdgeCorrespondence identity_correspondence(const SimpleGraph& g, Colour q) {
    std::vector<MatchPair> ident;
    ident.reserve(q);
    for (Colour c = 1; c <= q; ++c) ident.emplace_back(c, c);
    EdgeCorrespondence c = EdgeCorrespondence::build(g, q, {});
    std::vector<RawMatching> all;
    all.reserve(c.incident_pairs().size());
    for (const auto& pr : c.incident_pairs()) {
        all.push_back(RawMatching{pr.first, pr.second, ident});
    }
    return EdgeCorrespondence::build(g, q, all);
}

/// Identity on every incident pair of a cycle except the listed ones, which
/// get the cyclic shift c -> (c mod q) + 1 read smaller-edge-id-first.
inline EdgeCorrespondence shift_correspondence(const SimpleGraph& g, Colour q,
                                               const std::vector<std::pair<EdgeId, EdgeId>>& shifted) {
    if (g.vertex_count() < 3 || g.edge_count() != g.vertex_count()) {
        throw Error(Err::not_a_cycle, "graph is not a cycle");
    }
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        if (g.degree(v) != 2) {
            throw Error(Err::not_a_cycle, "vertex " + std::to_string(v) + " has degree != 2");
        }
    }
    // degree-2 everywhere with |E| = |V| leaves only a disjoint union of
    // cycles; require one component
    {
        std::vector<char> seen(g.vertex_count(), 0);
        std::vector<VertexId> stack{0};
        seen[0] = 1;
        std::size_t reached = 1;
        while (!stack.empty()) {
            VertexId v = stack.back();
            stack.pop_back();
            for (EdgeId e : g.edges_at(v)) {
                VertexId w = g.edge(e).other(v);
                if (!seen[w]) {
                    seen[w] = 1;
                    ++reached;
                    stack.push_back(w);
                }
            }
        }
        if (reached != g.vertex_count()) throw Error(Err::not_a_cycle, "graph is disconnected");
    }

    std::vector<MatchPair> ident, shift;
    for (Colour c = 1; c <= q; ++c) {
        ident.emplace_back(c, c);
        shift.emplace_back(c, (c % q) + 1);
    }
    EdgeCorrespondence skel = EdgeCorrespondence::build(g, q, {});
    std::vector<std::pair<EdgeId, EdgeId>> canon;
    canon.reserve(shifted.size());
    for (auto pr : shifted) {
        EdgeId a = std::min(pr.first, pr.second);
        EdgeId b = std::max(pr.first, pr.second);
        if (!skel.pairs_incident(a, b)) {
            throw Error(Err::not_incident,
                        "shifted pair (" + std::to_string(a) + "," + std::to_string(b) + ") is not incident");
        }
        canon.emplace_back(a, b);
    }
    std::sort(canon.begin(), canon.end());
    std::vector<RawMatching> all;
    for (const auto& pr : skel.incident_pairs()) {
        bool is_shift = std::binary_search(canon.begin(), canon.end(), pr);
        all.push_back(RawMatching{pr.first, pr.second, is_shift ? shift : ident});
    }
    return EdgeCorrespondence::build(g, q, all);
}

/// Seeded random correspondence. Each incident pair independently gets a
/// matching of size floor(density * q), sampled by shuffling two colour
/// subsets and zipping them. The draw depends only on (pair, seed), not on
/// the order pairs are visited in.
inline EdgeCorrespondence random_correspondence(const SimpleGraph& g, Colour q, double density,
                                                std::uint64_t seed) {
    if (!(density >= 0.0 && density <= 1.0)) {
        throw Error(Err::domain_error, "density must lie in [0, 1]");
    }
    const std::size_t size = static_cast<std::size_t>(density * q);
    EdgeCorrespondence skel = EdgeCorrespondence::build(g, q, {});
    std::vector<RawMatching> all;
    std::vector<Colour> firsts(q), seconds(q);
    for (const auto& pr : skel.incident_pairs()) {
        Stream s = Stream::derive(seed, {purpose_tag(StreamPurpose::corr_pair), pr.first, pr.second});
        for (Colour c = 0; c < q; ++c) firsts[c] = seconds[c] = c + 1;
        s.shuffle(firsts.data(), q);
        s.shuffle(seconds.data(), q);
        std::vector<Colour> chosen(firsts.begin(), firsts.begin() + size);
        std::sort(chosen.begin(), chosen.end());
        std::vector<MatchPair> pairs;
        pairs.reserve(size);
        for (std::size_t i = 0; i < size; ++i) pairs.emplace_back(chosen[i], seconds[i]);
        if (!pairs.empty()) all.push_back(RawMatching{pr.first, pr.second, pairs});
    }
    return EdgeCorrespondence::build(g, q, all);
}

/// Outcome of validate_correspondence: ok, or the first problem found.
struct CorrespondenceReport {
    bool ok = true;
    std::string detail;
};

/// Structural audit of a correspondence against its graph: pair universe
/// matches the graph's incident pairs, and every matching is a partial
/// matching over the palette. Returns a report instead of throwing so callers
/// can surface the verdict.
inline CorrespondenceReport validate_correspondence(const SimpleGraph& g, const EdgeCorrespondence& c) {
    CorrespondenceReport r;
    if (c.edge_count() != g.edge_count()) {
        r.ok = false;
        r.detail = "correspondence was built for a graph with " + std::to_string(c.edge_count()) +
                   " edges, this graph has " + std::to_string(g.edge_count());
        return r;
    }
    std::size_t expected_pairs = 0;
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        std::size_t d = g.degree(v);
        expected_pairs += d * (d - 1) / 2;
    }
    if (expected_pairs != c.incident_pairs().size()) {
        r.ok = false;
        r.detail = "pair universe has " + std::to_string(c.incident_pairs().size()) +
                   " entries, graph has " + std::to_string(expected_pairs) + " incident pairs";
        return r;
    }
    for (const auto& pr : c.incident_pairs()) {
        if (!g.incident(pr.first, pr.second)) {
            r.ok = false;
            r.detail = "pair (" + std::to_string(pr.first) + "," + std::to_string(pr.second) +
                       ") is not incident in the graph";
            return r;
        }
        ColourSet firsts(c.q()), seconds(c.q());
        for (const auto& mp : c.matching(pr.first, pr.second)) {
            if (mp.first < 1 || mp.first > c.q() || mp.second < 1 || mp.second > c.q()) {
                r.ok = false;
                r.detail = "pair (" + std::to_string(pr.first) + "," + std::to_string(pr.second) +
                           "): colour pair (" + std::to_string(mp.first) + "," + std::to_string(mp.second) +
                           ") outside palette";
                return r;
            }
            if (firsts.test(mp.first)) {
                r.ok = false;
                r.detail = "pair (" + std::to_string(pr.first) + "," + std::to_string(pr.second) +
                           "): colour " + std::to_string(mp.first) + " repeated as first element";
                return r;
            }
            if (seconds.test(mp.second)) {
                r.ok = false;
                r.detail = "pair (" + std::to_string(pr.first) + "," + std::to_string(pr.second) +
                           "): colour " + std::to_string(mp.second) + " repeated as second element";
                return r;
            }
            firsts.set(mp.first);
            seconds.set(mp.second);
        }
    }
    return r;
}

} // namespace nibbledp
