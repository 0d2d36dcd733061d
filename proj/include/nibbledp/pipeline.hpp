#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "nibbledp/colouring.hpp"
#include "nibbledp/correspondence.hpp"
#include "nibbledp/errors.hpp"
#include "nibbledp/finisher.hpp"
#include "nibbledp/graph.hpp"
#include "nibbledp/nibble.hpp"
#include "nibbledp/params.hpp"

namespace nibbledp {

struct PipelineConfig {
    std::uint64_t seed = 0;
    /// Epsilon for the scheduled recursion (theory mode) and the
    /// instrumentation bound (both modes).
    double eps = 0.2;
    /// Log factor in the activation probability; 0 picks max(ln(delta), 2),
    /// which keeps the probability sane on small-degree graphs. Only
    /// engineering schedules take it; theory schedules define their own.
    double ln_factor = 0.0;
    std::size_t retry_limit = 50;
    /// Redraw budget for the completion stage; 0 picks 10000 per residual
    /// edge.
    std::uint64_t resample_cap = 0;
    /// Margin the residual is measured against (l_min >= factor * t_max).
    double hypothesis_factor = 8.0;
    /// Engineering schedules follow the realized attrition with a
    /// fluctuation margin; the alternative runs the theoretical recursion,
    /// which needs astronomical degrees to produce more than a handful of
    /// rows.
    bool engineering = true;
    std::size_t max_iterations = 4;
    double list_floor = 8.0;
    double sigma_slack = 3.5;
    /// Ratio threshold for the theory schedule's halt; 0 keeps that
    /// schedule's default.
    double ratio_threshold = 0.0;
    bool collect_diagnostics = false;
};

enum class PipelineStatus {
    success,
    retry_exhausted,
    empty_residual,
    resample_cap_exceeded,
    validation_failed,
};

inline const char* pipeline_status_name(PipelineStatus s) {
    switch (s) {
        case PipelineStatus::success: return "success";
        case PipelineStatus::retry_exhausted: return "retry_exhausted";
        case PipelineStatus::empty_residual: return "empty_residual";
        case PipelineStatus::resample_cap_exceeded: return "resample_cap_exceeded";
        case PipelineStatus::validation_failed: return "validation_failed";
    }
    return "unknown";
}

/// Everything the full run produced. colouring is complete exactly when
/// status is success; otherwise it holds whatever the iterations committed.
/// hypothesis and finisher are present when their stage was reached.
struct PipelineResult {
    PipelineStatus status = PipelineStatus::success;
    Colouring colouring;
    ParamTrajectory schedule;
    NibbleRun nibble;
    std::optional<HypothesisReport> hypothesis;
    std::optional<FinisherResult> finisher;
    std::string detail; // set when status is validation_failed
};

/// The full pipeline: build a schedule from the graph's maximum degree, run
/// the iterations, extract the residual, complete it by resampling, and
/// validate the merged colouring independently before reporting success.
inline PipelineResult colour_instance(const SimpleGraph& g, const EdgeCorrespondence& corr,
                                      const PipelineConfig& config) {
    PipelineResult res;
    const double delta = std::max<double>(g.max_degree(), 1.0);
    const double lnF =
        config.ln_factor > 0.0 ? config.ln_factor : std::max(std::log(delta), 2.0);
    if (config.engineering) {
        res.schedule = engineering_trajectory(static_cast<double>(corr.q()), delta, lnF,
                                              config.max_iterations, config.list_floor,
                                              config.sigma_slack);
    } else {
        res.schedule = trajectory(config.eps, delta, 2, config.ratio_threshold);
    }

    RunConfig rc;
    rc.seed = config.seed;
    rc.eps = config.eps;
    rc.retry_limit = config.retry_limit;
    rc.collect_diagnostics = config.collect_diagnostics;
    res.nibble = run_nibble(g, corr, res.schedule, rc);
    res.colouring = res.nibble.partial;
    if (res.nibble.status == RunStatus::retry_exhausted) {
        res.status = PipelineStatus::retry_exhausted;
        return res;
    }

    ResidualInstance residual;
    try {
        residual = build_residual(res.nibble.state, g, corr);
    } catch (const Error& ex) {
        if (ex.code() == Err::empty_residual_list) {
            res.status = PipelineStatus::empty_residual;
            res.detail = ex.what();
            return res;
        }
        throw;
    }
    res.hypothesis = check_hypothesis(residual, config.hypothesis_factor);

    const std::uint64_t cap = config.resample_cap != 0
                                  ? config.resample_cap
                                  : 10000ULL * static_cast<std::uint64_t>(residual.edges.size());
    FinisherResult fin = complete_colouring(residual, config.seed, cap);
    res.nibble.trace.finisher_ran = true;
    res.nibble.trace.finisher_resamples = fin.resamples;
    res.nibble.trace.finisher_success = fin.success;
    res.finisher = fin;
    if (!fin.success) {
        res.status = PipelineStatus::resample_cap_exceeded;
        return res;
    }

    for (std::size_t i = 0; i < residual.edges.size(); ++i) {
        res.colouring.colour[residual.edges[i]] = fin.colours[i];
    }
    const ColouringReport check = validate_colouring(g, corr, res.colouring);
    if (!check.ok) {
        res.status = PipelineStatus::validation_failed;
        res.detail = check.detail;
        return res;
    }
    res.status = PipelineStatus::success;
    return res;
}

} // namespace nibbledp
