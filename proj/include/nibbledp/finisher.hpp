#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "nibbledp/correspondence.hpp"
#include "nibbledp/errors.hpp"
#include "nibbledp/graph.hpp"
#include "nibbledp/nibble.hpp"
#include "nibbledp/rng.hpp"

namespace nibbledp {

/// One incident pair of the residual instance: indices into
/// ResidualInstance::edges, a < b in original edge-id order, with the
/// matching restricted to colours both sides still list. Restricted pairs
/// stay sorted by their first colour.
struct ResidualPair {
    std::size_t a = 0;
    std::size_t b = 0;
    std::vector<MatchPair> pairs;
};

/// The uncoloured remainder of a run, re-indexed densely. t_max is the
/// largest number of restricted matching entries any single (edge, colour)
/// choice appears in, the instance's worst conflict exposure; l_min the
/// smallest list.
struct ResidualInstance {
    Colour q = 0;
    std::vector<EdgeId> edges;              // original ids, ascending
    std::vector<std::vector<Colour>> lists; // ascending colours, never empty
    std::vector<ResidualPair> pairs;
    std::size_t t_max = 0;
    std::size_t l_min = 0;
};

/// Extract the residual instance from a run's state. Lists are pruned once
/// more against the colours already committed on neighbouring edges (the
/// engine removes those during its rounds; this keeps the extraction safe on
/// hand-built states too). An uncoloured edge left with no colours raises
/// EmptyResidualList.
inline ResidualInstance build_residual(const NibbleState& st, const SimpleGraph& g,
                                       const EdgeCorrespondence& corr) {
    ResidualInstance r;
    r.q = st.q;
    std::vector<std::size_t> index(g.edge_count(), 0);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (st.coloured(e)) continue;
        index[e] = r.edges.size();
        r.edges.push_back(e);
        ColourSet remaining = st.list[e];
        for (int side = 0; side < 2; ++side) {
            const VertexId v = endpoint(g, e, side);
            for (EdgeId f : g.edges_at(v)) {
                if (f == e || !st.coloured(f)) continue;
                for (Colour c = 1; c <= st.q; ++c) {
                    if (!remaining.test(c)) continue;
                    const std::optional<Colour> part = corr.partner(e, c, f);
                    if (part && *part == *st.final_colour[f]) remaining.reset(c);
                }
            }
        }
        if (remaining.empty()) {
            throw Error(Err::empty_residual_list,
                        "edge " + std::to_string(e) + " is uncoloured with no colours left");
        }
        r.lists.push_back(remaining.to_vector());
    }

    std::vector<std::vector<std::size_t>> exposure(r.edges.size());
    for (std::size_t i = 0; i < r.edges.size(); ++i) exposure[i].assign(r.q, 0);
    for (const auto& pr : corr.incident_pairs()) {
        if (st.coloured(pr.first) || st.coloured(pr.second)) continue;
        ResidualPair rp;
        rp.a = index[pr.first];
        rp.b = index[pr.second];
        for (const auto& mp : corr.matching(pr.first, pr.second)) {
            const auto& la = r.lists[rp.a];
            const auto& lb = r.lists[rp.b];
            if (!std::binary_search(la.begin(), la.end(), mp.first)) continue;
            if (!std::binary_search(lb.begin(), lb.end(), mp.second)) continue;
            rp.pairs.push_back(mp);
            ++exposure[rp.a][mp.first - 1];
            ++exposure[rp.b][mp.second - 1];
        }
        if (!rp.pairs.empty()) r.pairs.push_back(rp);
    }

    r.l_min = 0;
    for (std::size_t i = 0; i < r.edges.size(); ++i) {
        const std::size_t len = r.lists[i].size();
        if (i == 0 || len < r.l_min) r.l_min = len;
        for (Colour c : r.lists[i]) {
            r.t_max = std::max(r.t_max, exposure[i][c - 1]);
        }
    }
    return r;
}

/// Whether the residual satisfies l_min >= factor * t_max, the margin the
/// completion stage's convergence argument asks for. An empty residual
/// passes vacuously.
struct HypothesisReport {
    bool ok = true;
    std::size_t l_min = 0;
    std::size_t t_max = 0;
    double factor = 0.0;
};

inline HypothesisReport check_hypothesis(const ResidualInstance& r, double factor = 8.0) {
    HypothesisReport h;
    h.l_min = r.l_min;
    h.t_max = r.t_max;
    h.factor = factor;
    if (!r.edges.empty()) {
        h.ok = static_cast<double>(r.l_min) >= factor * static_cast<double>(r.t_max);
    }
    return h;
}

struct FinisherResult {
    bool success = false;
    std::vector<Colour> colours; // per residual index; meaningful even on failure
    std::uint64_t resamples = 0;
    std::size_t remaining_violations = 0;
};

namespace detail {

/// Index of the restricted entry the two current colours realize, or npos.
inline std::size_t violated_entry(const ResidualPair& rp, Colour ca, Colour cb) {
    auto it = std::lower_bound(rp.pairs.begin(), rp.pairs.end(), ca,
                               [](const MatchPair& mp, Colour c) { return mp.first < c; });
    if (it != rp.pairs.end() && it->first == ca && it->second == cb) {
        return static_cast<std::size_t>(it - rp.pairs.begin());
    }
    return static_cast<std::size_t>(-1);
}

} // namespace detail

/// Complete the residual by resampling: colour every edge uniformly from its
/// list, then repeatedly pick the lowest-indexed violated pair and redraw
/// both of its edges, until no violation remains or resample_cap redraw
/// events have been spent. Every draw comes from a stream derived from the
/// original edge id (plus a per-edge redraw counter), so runs are replayable
/// and insensitive to how the residual was reached. When a log is supplied
/// it receives the violated pair index of each redraw event.
inline FinisherResult complete_colouring(const ResidualInstance& r, std::uint64_t seed,
                                         std::uint64_t resample_cap,
                                         std::vector<std::size_t>* resample_log = nullptr) {
    FinisherResult out;
    const std::size_t n = r.edges.size();
    if (n == 0) {
        out.success = true;
        return out;
    }

    std::vector<std::size_t> choice(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        Stream s = Stream::derive(seed, {purpose_tag(StreamPurpose::finisher_init), r.edges[i]});
        choice[i] = static_cast<std::size_t>(s.uniform_below(r.lists[i].size()));
    }

    std::vector<std::vector<std::size_t>> pairs_at(n);
    for (std::size_t j = 0; j < r.pairs.size(); ++j) {
        pairs_at[r.pairs[j].a].push_back(j);
        pairs_at[r.pairs[j].b].push_back(j);
    }

    auto is_violated = [&](std::size_t j) {
        const ResidualPair& rp = r.pairs[j];
        const Colour ca = r.lists[rp.a][choice[rp.a]];
        const Colour cb = r.lists[rp.b][choice[rp.b]];
        return detail::violated_entry(rp, ca, cb) != static_cast<std::size_t>(-1);
    };

    std::set<std::size_t> violated;
    for (std::size_t j = 0; j < r.pairs.size(); ++j) {
        if (is_violated(j)) violated.insert(j);
    }

    std::vector<std::uint64_t> redraws(n, 0);
    auto redraw = [&](std::size_t i) {
        ++redraws[i];
        Stream s = Stream::derive(
            seed, {purpose_tag(StreamPurpose::finisher_resample), r.edges[i], redraws[i]});
        choice[i] = static_cast<std::size_t>(s.uniform_below(r.lists[i].size()));
    };

    while (!violated.empty() && out.resamples < resample_cap) {
        const std::size_t j = *violated.begin();
        if (resample_log) resample_log->push_back(j);
        const ResidualPair& rp = r.pairs[j];
        redraw(rp.a);
        redraw(rp.b);
        ++out.resamples;
        for (std::size_t i : {rp.a, rp.b}) {
            for (std::size_t k : pairs_at[i]) {
                if (is_violated(k)) {
                    violated.insert(k);
                } else {
                    violated.erase(k);
                }
            }
        }
    }

    out.success = violated.empty();
    out.remaining_violations = violated.size();
    out.colours.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.colours[i] = r.lists[i][choice[i]];
    return out;
}

} // namespace nibbledp
