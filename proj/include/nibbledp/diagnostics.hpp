#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "nibbledp/errors.hpp"

namespace nibbledp {

/// Raw counts from one instrumented engine iteration, accumulated over every
/// live (edge, endpoint, colour) triple. Loss counts are per endpoint (a
/// colour can be lost at one endpoint and kept at the other); retention
/// counts are per (edge, colour). The tprime sums track the surviving-subset
/// sizes of the tracker sets against their per-member survival bound:
/// diff = |surviving subset| - bound_factor * |tracker|.
struct IterationDiagnostics {
    std::size_t iteration = 0;
    double scheduled_list = 0.0;
    double scheduled_tracker = 0.0;
    double keep = 0.0;
    double bound_factor = 0.0;

    std::uint64_t loss_trials = 0;
    std::uint64_t loss_events = 0;
    std::uint64_t retain_trials = 0;
    std::uint64_t retain_events = 0;

    std::uint64_t tprime_count = 0;
    double tracker_size_sum = 0.0;
    double tprime_size_sum = 0.0;
    double tprime_diff_sum = 0.0;
    double tprime_diff_sq_sum = 0.0;
};

inline double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) throw Error(Err::domain_error, "mean of an empty sample");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double sample_sd(const std::vector<double>& xs) {
    if (xs.size() < 2) throw Error(Err::domain_error, "sample sd needs at least two values");
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

/// z-score of a pooled estimate against a target, using the spread of
/// independent per-run means as the error scale. Per-triple outcomes inside
/// one run are correlated (shared activations), so the per-run means are the
/// independent unit; their standard error is sd/sqrt(runs).
inline double replicate_z(const std::vector<double>& per_run_means, double target) {
    const double se = sample_sd(per_run_means) / std::sqrt(static_cast<double>(per_run_means.size()));
    if (se == 0.0) {
        return (mean_of(per_run_means) == target) ? 0.0
                                                  : std::numeric_limits<double>::infinity();
    }
    return (mean_of(per_run_means) - target) / se;
}

} // namespace nibbledp
