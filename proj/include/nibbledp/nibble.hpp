#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nibbledp/colour_set.hpp"
#include "nibbledp/colouring.hpp"
#include "nibbledp/correspondence.hpp"
#include "nibbledp/diagnostics.hpp"
#include "nibbledp/errors.hpp"
#include "nibbledp/graph.hpp"
#include "nibbledp/params.hpp"
#include "nibbledp/rng.hpp"
#include "nibbledp/trace.hpp"

namespace nibbledp {

/// 0 when v is the smaller endpoint of e, 1 when the larger.
inline int side_of(const SimpleGraph& g, EdgeId e, VertexId v) {
    const Edge& ed = g.edge(e);
    if (v == ed.u) return 0;
    if (v == ed.v) return 1;
    throw Error(Err::not_an_endpoint,
                "vertex " + std::to_string(v) + " is not an endpoint of edge " + std::to_string(e));
}

inline VertexId endpoint(const SimpleGraph& g, EdgeId e, int side) {
    return side == 0 ? g.edge(e).u : g.edge(e).v;
}

/// Mutable state of one colouring run. tracker[e][side][c-1] holds the edges
/// at that endpoint of e whose matching sends colour c of e to a colour still
/// on their own list, ascending by edge id; side 0 is the smaller endpoint.
/// Freshly initialised trackers are the literal incidence lists (every
/// neighbouring edge, for every colour); the first truncation rebuilds them
/// from the matchings.
struct NibbleState {
    Colour q = 0;
    std::vector<ColourSet> list;
    std::vector<std::optional<Colour>> final_colour;
    std::vector<std::array<std::vector<std::vector<EdgeId>>, 2>> tracker;
    std::size_t iteration = 0;

    bool coloured(EdgeId e) const { return final_colour[e].has_value(); }

    std::size_t uncoloured_count() const {
        std::size_t n = 0;
        for (const auto& c : final_colour)
            if (!c) ++n;
        return n;
    }
};

/// Everything drawn or snapshotted during one iteration attempt. step_lists
/// freezes the post-truncation lists the round's probabilities refer to
/// (empty for already-coloured edges); conflict_lost and flip_lost record
/// removals per edge and endpoint against that snapshot.
struct IterationEvents {
    std::uint64_t seed = 0;
    std::size_t iteration = 0;
    std::size_t attempt = 0;
    double activation_prob = 0.0;
    double log1p_neg_p = 0.0;
    double scheduled_tracker = 0.0;
    std::size_t step_uncoloured = 0;
    std::vector<ColourSet> step_lists;
    std::vector<std::pair<EdgeId, Colour>> activations; // sorted by edge, then colour
    std::vector<std::array<ColourSet, 2>> conflict_lost;
    std::vector<std::array<ColourSet, 2>> flip_lost;
};

/// Validate the correspondence against the graph and set up the starting
/// state: full palettes everywhere, no colours committed, literal incidence
/// trackers.
inline NibbleState init_state(const SimpleGraph& g, const EdgeCorrespondence& corr) {
    const CorrespondenceReport report = validate_correspondence(g, corr);
    if (!report.ok) throw Error(Err::invalid_correspondence, report.detail);
    NibbleState st;
    st.q = corr.q();
    const EdgeId m = g.edge_count();
    st.list.assign(m, ColourSet(st.q, true));
    st.final_colour.assign(m, std::nullopt);
    st.tracker.resize(m);
    for (EdgeId e = 0; e < m; ++e) {
        for (int side = 0; side < 2; ++side) {
            const std::vector<EdgeId> inc = g.incident_edges(e, endpoint(g, e, side));
            st.tracker[e][side].assign(st.q, inc);
        }
    }
    return st;
}

/// Rebuild every tracker from the current lists: f joins tracker[e][side][c-1]
/// iff f is uncoloured, shares that endpoint of e, and the matching pairs
/// (e,c) with a colour still on L(f). Colours no longer on L(e) and coloured
/// edges get empty trackers.
inline void recompute_trackers(NibbleState& st, const SimpleGraph& g,
                               const EdgeCorrespondence& corr) {
    for (auto& per_edge : st.tracker)
        for (auto& per_side : per_edge)
            for (auto& members : per_side) members.clear();
    for (const auto& [a, b] : corr.incident_pairs()) {
        if (st.coloured(a) || st.coloured(b)) continue;
        const VertexId v = g.shared_vertex(a, b);
        const int sa = side_of(g, a, v);
        const int sb = side_of(g, b, v);
        for (const auto& [ca, cb] : corr.matching(a, b)) {
            if (!st.list[a].test(ca) || !st.list[b].test(cb)) continue;
            st.tracker[a][sa][ca - 1].push_back(b);
            st.tracker[b][sb][cb - 1].push_back(a);
        }
    }
}

namespace detail {

/// Integer list size a real-valued schedule row asks for.
inline std::uint32_t truncation_target(double target) {
    double t = std::ceil(target - 1e-9);
    if (t < 1.0) t = 1.0;
    return static_cast<std::uint32_t>(t);
}

} // namespace detail

/// Cut every uncoloured edge's list down to the row's size by dropping the
/// largest colours, then rebuild the trackers. Throws ListTooShort when some
/// list is already smaller than the target.
inline void truncate_lists(NibbleState& st, const SimpleGraph& g, const EdgeCorrespondence& corr,
                           double target) {
    const std::uint32_t want = detail::truncation_target(target);
    for (EdgeId e = 0; e < st.list.size(); ++e) {
        if (st.coloured(e)) continue;
        std::uint32_t have = st.list[e].count();
        if (have < want) {
            throw Error(Err::list_too_short, "edge " + std::to_string(e) + " has " +
                                                 std::to_string(have) +
                                                 " colours, the schedule row wants " +
                                                 std::to_string(want));
        }
        while (have > want) {
            st.list[e].reset(st.list[e].largest());
            --have;
        }
    }
    recompute_trackers(st, g, corr);
}

/// Freeze the round's reference data: snapshot lists, the derived
/// probabilities, and cleared removal sets.
inline IterationEvents snapshot_events(const NibbleState& st, std::uint64_t seed,
                                       std::size_t iteration, std::size_t attempt,
                                       double activation_prob, double scheduled_tracker) {
    if (!(activation_prob > 0.0 && activation_prob < 1.0)) {
        throw Error(Err::domain_error, "activation probability " +
                                           std::to_string(activation_prob) +
                                           " outside (0,1)");
    }
    if (!(scheduled_tracker >= 0.0)) {
        throw Error(Err::domain_error, "scheduled tracker bound must be non-negative");
    }
    IterationEvents ev;
    ev.seed = seed;
    ev.iteration = iteration;
    ev.attempt = attempt;
    ev.activation_prob = activation_prob;
    ev.log1p_neg_p = std::log1p(-activation_prob);
    ev.scheduled_tracker = scheduled_tracker;
    ev.step_lists.reserve(st.list.size());
    for (EdgeId e = 0; e < st.list.size(); ++e) {
        if (st.coloured(e)) {
            ev.step_lists.emplace_back(st.q);
        } else {
            ev.step_lists.push_back(st.list[e]);
            ++ev.step_uncoloured;
        }
    }
    ev.conflict_lost.assign(st.list.size(), {ColourSet(st.q), ColourSet(st.q)});
    ev.flip_lost.assign(st.list.size(), {ColourSet(st.q), ColourSet(st.q)});
    return ev;
}

/// Draw the round's activations: every listed (edge, colour) pair of an
/// uncoloured edge activates independently with probability activation_prob
/// from its own derived stream, so any single decision can be replayed in
/// isolation. Results come out sorted by edge, then colour.
inline void activation_round(const NibbleState& st, IterationEvents& ev) {
    ev.activations.clear();
    for (EdgeId e = 0; e < st.list.size(); ++e) {
        if (st.coloured(e)) continue;
        for (Colour c = 1; c <= st.q; ++c) {
            if (!st.list[e].test(c)) continue;
            Stream s = Stream::derive(ev.seed, {purpose_tag(StreamPurpose::activation),
                                                ev.iteration, ev.attempt, e, c});
            if (s.bernoulli(ev.activation_prob)) ev.activations.emplace_back(e, c);
        }
    }
}

/// Remove the colours killed by activations: when (e,c) activated, every
/// uncoloured incident edge whose matching pairs one of its colours with
/// (e,c) loses that colour at the shared endpoint, whether or not c itself
/// ends up retained. Removals are collected against the snapshot lists, so
/// processing order cannot matter, then applied in one pass.
inline void conflict_removal(NibbleState& st, const SimpleGraph& g, const EdgeCorrespondence& corr,
                             IterationEvents& ev) {
    for (const auto& [e, c] : ev.activations) {
        for (int side = 0; side < 2; ++side) {
            const VertexId v = endpoint(g, e, side);
            for (EdgeId f : g.edges_at(v)) {
                if (f == e || st.coloured(f)) continue;
                const std::optional<Colour> part = corr.partner(e, c, f);
                if (part && ev.step_lists[f].test(*part)) {
                    ev.conflict_lost[f][side_of(g, f, v)].set(*part);
                }
            }
        }
    }
    for (EdgeId e = 0; e < st.list.size(); ++e) {
        if (st.coloured(e)) continue;
        for (Colour c = 1; c <= st.q; ++c) {
            if (ev.conflict_lost[e][0].test(c) || ev.conflict_lost[e][1].test(c)) {
                st.list[e].reset(c);
            }
        }
    }
}

/// The equalizing coin for colour c of edge e at one endpoint: survive with
/// probability (1-p)^(scheduled_tracker - tracker_size), topping the real
/// conflict exposure up to an exact per-endpoint loss rate. Deterministic in
/// its stream key, so a caller may re-evaluate it for triples the engine
/// never needed to draw and get an independent, reproducible coin.
inline bool flip_survives(std::uint64_t seed, std::size_t iteration, std::size_t attempt, EdgeId e,
                          Colour c, int side, std::size_t tracker_size, double scheduled_tracker,
                          double log1p_neg_p) {
    const double eq =
        std::exp((scheduled_tracker - static_cast<double>(tracker_size)) * log1p_neg_p);
    Stream s = Stream::derive(seed, {purpose_tag(StreamPurpose::flip), iteration, attempt, e, c,
                                     static_cast<std::uint64_t>(side)});
    return s.bernoulli(eq);
}

/// Draw the equalizing coins for every colour that survived conflict removal
/// at an endpoint, and remove the colours whose coin failed. A tracker larger
/// than the scheduled bound would need a survival probability above 1; that
/// is a schedule violation, reported as ProbabilityOverflow.
inline void equalizing_flips(NibbleState& st, IterationEvents& ev) {
    for (EdgeId e = 0; e < st.list.size(); ++e) {
        if (st.coloured(e)) continue;
        for (Colour c = 1; c <= st.q; ++c) {
            if (!ev.step_lists[e].test(c)) continue;
            for (int side = 0; side < 2; ++side) {
                if (ev.conflict_lost[e][side].test(c)) continue;
                const std::size_t n = st.tracker[e][side][c - 1].size();
                if (static_cast<double>(n) > ev.scheduled_tracker) {
                    throw Error(Err::probability_overflow,
                                "tracker for edge " + std::to_string(e) + " colour " +
                                    std::to_string(c) + " holds " + std::to_string(n) +
                                    " edges, above the scheduled bound " +
                                    std::to_string(ev.scheduled_tracker));
                }
                if (!flip_survives(ev.seed, ev.iteration, ev.attempt, e, c, side, n,
                                   ev.scheduled_tracker, ev.log1p_neg_p)) {
                    ev.flip_lost[e][side].set(c);
                }
            }
        }
    }
    for (EdgeId e = 0; e < st.list.size(); ++e) {
        if (st.coloured(e)) continue;
        for (Colour c = 1; c <= st.q; ++c) {
            if (ev.flip_lost[e][0].test(c) || ev.flip_lost[e][1].test(c)) st.list[e].reset(c);
        }
    }
}

/// The surviving-threat set for colour c of edge e at one endpoint, read off
/// the round's events before trackers are rebuilt: members of the snapshot
/// tracker that stayed uncoloured and whose matched colour was not lost at
/// their far endpoint. The rebuilt tracker for the next round is always a
/// subset, since a colour that kept its place on a list survived at both
/// endpoints.
inline std::vector<EdgeId> compute_t_prime(const NibbleState& st, const IterationEvents& ev,
                                           const SimpleGraph& g, const EdgeCorrespondence& corr,
                                           EdgeId e, int side, Colour c) {
    std::vector<EdgeId> out;
    const VertexId v = endpoint(g, e, side);
    for (EdgeId f : st.tracker[e][side][c - 1]) {
        if (st.coloured(f)) continue;
        const Colour cf = *corr.partner(e, c, f);
        const VertexId w = g.edge(f).other(v);
        const int sw = side_of(g, f, w);
        if (ev.conflict_lost[f][sw].test(cf)) continue;
        const std::size_t n = st.tracker[f][sw][cf - 1].size();
        if (!flip_survives(ev.seed, ev.iteration, ev.attempt, f, cf, sw, n, ev.scheduled_tracker,
                           ev.log1p_neg_p)) {
            continue;
        }
        out.push_back(f);
    }
    return out;
}

/// What finalize_iteration reports back to the run loop. List statistics
/// cover uncoloured edges after the round's removals; tracker statistics
/// cover their listed colours after the rebuild. property_ok asks whether
/// every list still meets the next row's size and every tracker stays under
/// the next row's bound.
struct IterationOutcome {
    std::size_t newly_retained = 0;
    bool property_ok = true;
    std::size_t list_shortfalls = 0;
    std::size_t tracker_overflows = 0;
    std::size_t min_list = 0;
    double mean_list = 0.0;
    std::size_t max_tracker = 0;
    double mean_tracker = 0.0;
};

/// Close out a round: commit the surviving activations (smallest colour first
/// on each edge), optionally harvest per-triple statistics while the snapshot
/// trackers are still in place, then rebuild the trackers and measure the
/// state against the next schedule row.
inline IterationOutcome finalize_iteration(NibbleState& st, const SimpleGraph& g,
                                           const EdgeCorrespondence& corr,
                                           const IterationEvents& ev, double next_list,
                                           double next_tracker,
                                           IterationDiagnostics* diag = nullptr) {
    IterationOutcome out;
    for (const auto& [e, c] : ev.activations) {
        if (st.coloured(e)) continue;
        if (!st.list[e].test(c)) continue;
        st.final_colour[e] = c;
        ++out.newly_retained;
    }

    if (diag) {
        for (EdgeId e = 0; e < st.list.size(); ++e) {
            for (Colour c = 1; c <= st.q; ++c) {
                if (!ev.step_lists[e].test(c)) continue;
                ++diag->retain_trials;
                if (st.list[e].test(c)) ++diag->retain_events;
                for (int side = 0; side < 2; ++side) {
                    const std::size_t n = st.tracker[e][side][c - 1].size();
                    ++diag->loss_trials;
                    const bool lost = ev.conflict_lost[e][side].test(c) ||
                                      !flip_survives(ev.seed, ev.iteration, ev.attempt, e, c, side,
                                                     n, ev.scheduled_tracker, ev.log1p_neg_p);
                    if (lost) ++diag->loss_events;
                    const auto tp = compute_t_prime(st, ev, g, corr, e, side, c);
                    ++diag->tprime_count;
                    diag->tracker_size_sum += static_cast<double>(n);
                    diag->tprime_size_sum += static_cast<double>(tp.size());
                    const double diff =
                        static_cast<double>(tp.size()) - diag->bound_factor * static_cast<double>(n);
                    diag->tprime_diff_sum += diff;
                    diag->tprime_diff_sq_sum += diff * diff;
                }
            }
        }
    }

    recompute_trackers(st, g, corr);

    const std::uint32_t want = detail::truncation_target(next_list);
    std::size_t uncoloured = 0;
    std::size_t list_sum = 0;
    std::size_t tracker_sum = 0;
    std::size_t tracker_entries = 0;
    out.min_list = std::numeric_limits<std::size_t>::max();
    for (EdgeId e = 0; e < st.list.size(); ++e) {
        if (st.coloured(e)) continue;
        ++uncoloured;
        const std::uint32_t have = st.list[e].count();
        list_sum += have;
        out.min_list = std::min<std::size_t>(out.min_list, have);
        if (have < want) ++out.list_shortfalls;
        for (Colour c = 1; c <= st.q; ++c) {
            if (!st.list[e].test(c)) continue;
            for (int side = 0; side < 2; ++side) {
                const std::size_t n = st.tracker[e][side][c - 1].size();
                tracker_sum += n;
                ++tracker_entries;
                out.max_tracker = std::max(out.max_tracker, n);
                if (static_cast<double>(n) > next_tracker) ++out.tracker_overflows;
            }
        }
    }
    if (uncoloured == 0) out.min_list = 0;
    out.mean_list = uncoloured ? static_cast<double>(list_sum) / static_cast<double>(uncoloured) : 0.0;
    out.mean_tracker =
        tracker_entries ? static_cast<double>(tracker_sum) / static_cast<double>(tracker_entries) : 0.0;
    out.property_ok = out.list_shortfalls == 0 && out.tracker_overflows == 0;
    return out;
}

enum class RunStatus { success, retry_exhausted };

inline const char* run_status_name(RunStatus s) {
    switch (s) {
        case RunStatus::success: return "success";
        case RunStatus::retry_exhausted: return "retry_exhausted";
    }
    return "unknown";
}

struct RunConfig {
    std::uint64_t seed = 0;
    /// Epsilon the instrumentation bound uses when the schedule itself does
    /// not carry one (engineering schedules).
    double eps = 0.2;
    /// Attempts allowed per iteration before the run gives up.
    std::size_t retry_limit = 50;
    bool collect_diagnostics = false;
};

struct NibbleRun {
    RunStatus status = RunStatus::success;
    NibbleState state;
    Colouring partial;
    RunTrace trace;
    std::vector<IterationDiagnostics> diagnostics;
    std::optional<std::size_t> failed_iteration;
};

/// Execute a schedule: each consecutive row pair drives one iteration, with
/// the earlier row setting this round's sizes and probabilities and the later
/// row serving as the target the finished round is measured against. A round
/// whose outcome misses the target is rolled back and redrawn under a fresh
/// attempt number. The final row is only ever a target, so a one-row schedule
/// runs no iterations; the lists left behind are the residual instance.
inline NibbleRun run_nibble(const SimpleGraph& g, const EdgeCorrespondence& corr,
                            const ParamTrajectory& schedule, const RunConfig& config) {
    if (schedule.rows.empty()) throw Error(Err::schedule_empty, "schedule has no rows");
    if (config.retry_limit == 0) {
        throw Error(Err::domain_error, "retry limit must be at least 1");
    }

    NibbleRun run;
    run.state = init_state(g, corr);
    run.trace.seed = config.seed;
    run.trace.eps = schedule.engineering ? config.eps : schedule.eps;
    run.trace.delta = schedule.delta;
    run.trace.halt = halt_reason_name(schedule.halt);

    const EdgeId m = g.edge_count();
    if (m == 0) {
        run.partial = Colouring(0);
        return run;
    }
    const double lnF = schedule.ln_factor;
    const double eps = run.trace.eps;

    for (std::size_t i = 0; i + 1 < schedule.rows.size(); ++i) {
        const TrajectoryRow& row = schedule.rows[i];
        const TrajectoryRow& next = schedule.rows[i + 1];
        const double p = 1.0 / (row.list_size * lnF);

        const NibbleState saved = run.state;
        IterationOutcome outcome;
        IterationDiagnostics diag;
        std::size_t attempts_used = 0;
        bool ok = false;
        for (std::size_t attempt = 0; attempt < config.retry_limit; ++attempt) {
            if (attempt > 0) run.state = saved;
            truncate_lists(run.state, g, corr, row.list_size);
            IterationEvents ev =
                snapshot_events(run.state, config.seed, i, attempt, p, row.tracker_bound);
            activation_round(run.state, ev);
            conflict_removal(run.state, g, corr, ev);
            equalizing_flips(run.state, ev);
            diag = IterationDiagnostics{};
            if (config.collect_diagnostics) {
                diag.iteration = i;
                diag.scheduled_list = row.list_size;
                diag.scheduled_tracker = row.tracker_bound;
                diag.keep = row.keep;
                diag.bound_factor =
                    (1.0 - (1.0 - eps / 2.0) * row.keep * row.keep / lnF) * row.keep;
            }
            outcome = finalize_iteration(run.state, g, corr, ev, next.list_size,
                                         next.tracker_bound,
                                         config.collect_diagnostics ? &diag : nullptr);
            attempts_used = attempt + 1;
            if (outcome.property_ok) {
                ok = true;
                break;
            }
        }
        run.state.iteration = i + 1;

        TraceRow tr;
        tr.iteration = i;
        tr.scheduled_list = row.list_size;
        tr.scheduled_tracker = row.tracker_bound;
        tr.scheduled_keep = row.keep;
        tr.list_min = outcome.min_list;
        tr.list_mean = outcome.mean_list;
        tr.tracker_max = outcome.max_tracker;
        tr.tracker_mean = outcome.mean_tracker;
        tr.tprime_mean = (config.collect_diagnostics && diag.tprime_count > 0)
                             ? diag.tprime_size_sum / static_cast<double>(diag.tprime_count)
                             : std::numeric_limits<double>::quiet_NaN();
        tr.newly_retained = outcome.newly_retained;
        tr.uncoloured = run.state.uncoloured_count();
        tr.retries = attempts_used - 1;
        run.trace.rows.push_back(tr);
        if (config.collect_diagnostics) run.diagnostics.push_back(diag);

        if (!ok) {
            run.status = RunStatus::retry_exhausted;
            run.failed_iteration = i;
            break;
        }
    }

    run.partial = Colouring(m);
    for (EdgeId e = 0; e < m; ++e) run.partial.colour[e] = run.state.final_colour[e];
    return run;
}

} // namespace nibbledp
