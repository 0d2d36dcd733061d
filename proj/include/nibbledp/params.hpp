#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nibbledp/errors.hpp"
#include "nibbledp/format.hpp"

namespace nibbledp {

/// Survival probability of one colour against one endpoint's activations:
/// (1 - 1/(list_size * ln_factor))^tracker_bound, evaluated in exp/log1p form
/// so it stays accurate when tracker_bound is huge.
inline double keep_value_ln(double list_size, double tracker_bound, double ln_factor) {
    if (!(tracker_bound >= 0.0)) {
        throw Error(Err::domain_error, "tracker bound must be non-negative");
    }
    if (!(ln_factor > 0.0) || !(list_size * ln_factor > 1.0)) {
        throw Error(Err::domain_error,
                    "activation probability 1/(list_size * ln_factor) must be below 1");
    }
    return std::exp(tracker_bound * std::log1p(-1.0 / (list_size * ln_factor)));
}

/// keep_value_ln with ln_factor = ln(delta), the schedule's natural choice.
inline double keep_value(double list_size, double tracker_bound, double delta) {
    if (!(delta > 1.0)) throw Error(Err::domain_error, "delta must exceed 1");
    return keep_value_ln(list_size, tracker_bound, std::log(delta));
}

/// One recursion step of the scheduled parameters. For uniformity k the list
/// size scales by keep^k minus a delta^(2/3) slack term; the tracker bound
/// scales by (1 - (1-eps/2) keep^k / ln delta) * keep^(k-1) plus the same
/// slack. k = 2 is the graph case.
inline std::pair<double, double> next_params(double list_size, double tracker_bound, double keep,
                                             double delta, double eps, unsigned k = 2) {
    if (k < 2) throw Error(Err::domain_error, "uniformity must be at least 2");
    const double slack = std::pow(delta, 2.0 / 3.0);
    const double keep_k = std::pow(keep, static_cast<int>(k));
    const double keep_k1 = std::pow(keep, static_cast<int>(k) - 1);
    const double shrink = (1.0 - eps / 2.0) / std::log(delta) * keep_k;
    double next_list = list_size * keep_k - slack;
    double next_tracker = tracker_bound * (1.0 - shrink) * keep_k1 + slack;
    return {next_list, next_tracker};
}

/// One scheduled iteration: target list size, tracker bound, the keep
/// probability those imply, and their ratio.
struct TrajectoryRow {
    std::size_t index = 0;
    double list_size = 0.0;
    double tracker_bound = 0.0;
    double keep = 0.0;
    double ratio = 0.0;
};

enum class HaltReason {
    l_below,         // list size fell below the floor
    t_below,         // tracker bound fell below the floor
    ratio_exceeded,  // list/tracker ratio crossed the threshold
    iteration_cap,   // engineering schedule ran out of allowed iterations
    list_floor,      // engineering schedule's next list size fell below the floor
};

inline const char* halt_reason_name(HaltReason r) {
    switch (r) {
        case HaltReason::l_below: return "l_below";
        case HaltReason::t_below: return "t_below";
        case HaltReason::ratio_exceeded: return "ratio_exceeded";
        case HaltReason::iteration_cap: return "iteration_cap";
        case HaltReason::list_floor: return "list_floor";
    }
    return "unknown";
}

/// Full parameter schedule: the rows the engine will execute, why it stops,
/// and data-quality markers. `crossover` is set when the ratio threshold was
/// reached. `progress_failed_at` marks the first step whose ratio failed to
/// increase; `slack_violation_at` marks the first row where the delta^(2/3)
/// slack is not second-order (>= 1% of list_size * keep^k). Both markers
/// signal that delta is too small for the asymptotic guarantees; the rows are
/// still exact evaluations of the recursion.
struct ParamTrajectory {
    double eps = 0.0; // 0 for engineering schedules
    double delta = 0.0;
    double ln_factor = 0.0;
    unsigned k = 2;
    bool engineering = false;
    double ratio_threshold = 0.0; // 0 when not applicable
    double halt_floor = 0.0;      // delta^(9/10), or the engineering list floor
    std::vector<TrajectoryRow> rows;
    HaltReason halt = HaltReason::l_below;
    std::optional<std::size_t> crossover;
    std::optional<std::size_t> progress_failed_at;
    std::optional<std::size_t> slack_violation_at;
};

/// Iterate next_params from (list, tracker) = ((1+eps)·delta, delta) until a
/// halting condition: list below delta^(9/10), tracker below delta^(9/10), or
/// list > ratio_threshold · tracker (default threshold 5k). The halting row is
/// recorded. eps may be any value in (0,1); the recursion is well defined
/// there even where the asymptotic monotonicity analysis needs eps < 1/12 and
/// huge delta; the markers on the result carry that caveat.
inline ParamTrajectory trajectory(double eps, double delta, unsigned k = 2,
                                  double ratio_threshold = 0.0) {
    if (!(eps > 0.0 && eps < 1.0)) throw Error(Err::domain_error, "eps must lie in (0, 1)");
    if (!(delta > 1.0)) throw Error(Err::domain_error, "delta must exceed 1");
    if (k < 2) throw Error(Err::domain_error, "uniformity must be at least 2");
    if (ratio_threshold == 0.0) ratio_threshold = 5.0 * k;
    if (!(ratio_threshold > 0.0)) throw Error(Err::domain_error, "ratio threshold must be positive");

    ParamTrajectory tr;
    tr.eps = eps;
    tr.delta = delta;
    tr.ln_factor = std::log(delta);
    tr.k = k;
    tr.ratio_threshold = ratio_threshold;
    tr.halt_floor = std::pow(delta, 0.9);
    const double slack = std::pow(delta, 2.0 / 3.0);

    double list = (1.0 + eps) * delta;
    double tracker = delta;
    for (std::size_t i = 0;; ++i) {
        const double keep = keep_value_ln(list, tracker, tr.ln_factor);
        const double ratio = list / tracker;
        tr.rows.push_back({i, list, tracker, keep, ratio});
        if (i > 0 && !tr.progress_failed_at && !(ratio > tr.rows[i - 1].ratio)) {
            tr.progress_failed_at = i;
        }
        if (!tr.slack_violation_at &&
            !(slack < 0.01 * list * std::pow(keep, static_cast<int>(k)))) {
            tr.slack_violation_at = i;
        }
        if (list < tr.halt_floor) {
            tr.halt = HaltReason::l_below;
            break;
        }
        if (tracker < tr.halt_floor) {
            tr.halt = HaltReason::t_below;
            break;
        }
        if (list > ratio_threshold * tracker) {
            tr.halt = HaltReason::ratio_exceeded;
            tr.crossover = i;
            break;
        }
        auto [next_list, next_tracker] = next_params(list, tracker, keep, delta, eps, k);
        list = next_list;
        tracker = next_tracker;
    }
    return tr;
}

/// Small-delta schedule. The tracker row stays pinned at delta, which every
/// realized tracker set trivially respects (an endpoint has at most delta-1
/// other edges), so the flip probabilities stay valid without asymptotics.
/// The list row recurses with a fluctuation margin in place of the
/// delta^(2/3) slack: next = list·keep² − sigma_slack·sd − 1, where sd is the
/// binomial standard deviation of a surviving list's size. With sigma_slack =
/// 3.5 a truncation shortfall on any single edge is a ~1e-4 event, so whole
/// iterations rarely need retrying. Stops when the next list size would drop
/// below list_floor, or after max_iterations rows beyond the first.
inline ParamTrajectory engineering_trajectory(double initial_list, double delta, double ln_factor,
                                              std::size_t max_iterations, double list_floor = 8.0,
                                              double sigma_slack = 3.5) {
    if (!(initial_list >= 1.0)) throw Error(Err::domain_error, "initial list size must be at least 1");
    if (!(delta >= 1.0)) throw Error(Err::domain_error, "delta must be at least 1");
    if (!(ln_factor > 0.0)) throw Error(Err::domain_error, "ln_factor must be positive");
    if (!(list_floor >= 1.0)) throw Error(Err::domain_error, "list floor must be at least 1");
    if (!(sigma_slack >= 0.0)) throw Error(Err::domain_error, "sigma slack must be non-negative");

    ParamTrajectory tr;
    tr.delta = delta;
    tr.ln_factor = ln_factor;
    tr.engineering = true;
    tr.halt_floor = list_floor;

    double list = initial_list;
    const double tracker = delta;
    for (std::size_t i = 0;; ++i) {
        const double keep = keep_value_ln(list, tracker, ln_factor);
        tr.rows.push_back({i, list, tracker, keep, list / tracker});
        if (i == max_iterations) {
            tr.halt = HaltReason::iteration_cap;
            break;
        }
        const double survive = keep * keep;
        const double mean = list * survive;
        const double sd = std::sqrt(std::max(0.0, mean * (1.0 - survive)));
        const double next = mean - sigma_slack * sd - 1.0;
        if (next < list_floor) {
            tr.halt = HaltReason::list_floor;
            break;
        }
        list = next;
    }
    return tr;
}

/// X solving (1+eps)(1+eps/4)^X = ratio_threshold: the analytic iteration
/// budget for the ratio to cross the threshold when each step multiplies it
/// by at least 1+eps/4 per ln(delta) iterations.
inline double analytic_crossover_bound(double eps, double ratio_threshold) {
    if (!(eps > 0.0)) throw Error(Err::domain_error, "eps must be positive");
    if (!(ratio_threshold > 1.0 + eps)) {
        throw Error(Err::domain_error, "ratio threshold must exceed 1+eps");
    }
    return std::log(ratio_threshold / (1.0 + eps)) / std::log1p(eps / 4.0);
}

struct CrossoverPoint {
    double delta = 0.0;
    HaltReason halt = HaltReason::l_below;
    std::optional<std::size_t> crossover;
    std::optional<double> x_effective; // crossover / ln(delta), when crossed
};

struct CrossoverAnalysis {
    double eps = 0.0;
    unsigned k = 2;
    double ratio_threshold = 0.0;
    double x_analytic = 0.0;
    std::vector<CrossoverPoint> points;
};

/// Sweep trajectories over a delta grid and report where (and whether) the
/// ratio threshold is crossed. Refuses eps >= 1/12: the monotone-growth
/// analysis behind the analytic bound only covers that range. Points that
/// halt without crossing are reported as such: small deltas genuinely never
/// cross (the ratio decreases there), and pretending otherwise would be
/// worse than reporting it.
inline CrossoverAnalysis crossover_analysis(double eps, unsigned k = 2,
                                            std::vector<double> grid = {}) {
    if (!(eps > 0.0 && eps < 1.0 / 12.0)) {
        throw Error(Err::domain_error, "crossover analysis requires eps in (0, 1/12)");
    }
    if (k < 2) throw Error(Err::domain_error, "uniformity must be at least 2");
    if (grid.empty()) grid = {1e4, 1e5, 1e6, 1e7, 1e8, 1e9};

    CrossoverAnalysis out;
    out.eps = eps;
    out.k = k;
    out.ratio_threshold = 5.0 * k;
    out.x_analytic = analytic_crossover_bound(eps, out.ratio_threshold);
    for (double delta : grid) {
        ParamTrajectory tr = trajectory(eps, delta, k, out.ratio_threshold);
        CrossoverPoint p;
        p.delta = delta;
        p.halt = tr.halt;
        p.crossover = tr.crossover;
        if (tr.crossover) {
            p.x_effective = static_cast<double>(*tr.crossover) / std::log(delta);
        }
        out.points.push_back(p);
    }
    return out;
}

/// Schedule rows as CSV. Header and row shape are a stable interface; doubles
/// print in round-trip form.
inline std::string trajectory_csv(const ParamTrajectory& tr) {
    std::string out = "i,L_i,T_i,Keep_i,ratio\n";
    for (const auto& row : tr.rows) {
        out += std::to_string(row.index);
        out += ',';
        out += detail::fmt_double(row.list_size);
        out += ',';
        out += detail::fmt_double(row.tracker_bound);
        out += ',';
        out += detail::fmt_double(row.keep);
        out += ',';
        out += detail::fmt_double(row.ratio);
        out += '\n';
    }
    return out;
}

} // namespace nibbledp
