#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"

#include "nibbledp/nibbledp.hpp"

namespace {

using namespace nibbledp;

int status_exit_code(PipelineStatus s) {
    switch (s) {
        case PipelineStatus::success: return 0;
        case PipelineStatus::retry_exhausted: return 3;
        case PipelineStatus::empty_residual: return 3;
        case PipelineStatus::resample_cap_exceeded: return 4;
        case PipelineStatus::validation_failed: return 5;
    }
    return 1;
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-") {
        std::fwrite(content.data(), 1, content.size(), stdout);
    } else {
        write_text_file(out_path, content);
    }
}

struct GenOptions {
    std::string graph = "random";
    std::uint32_t n = 24;
    std::uint32_t degree_cap = 5;
    std::uint32_t q = 12;
    std::string corr = "identity";
    double density = 1.0;
    std::vector<std::string> shift;
    std::uint64_t seed = 0;
    std::string out;
};

int run_gen(const GenOptions& opt) {
    SimpleGraph g = [&] {
        if (opt.graph == "cycle") return gen_cycle(opt.n);
        if (opt.graph == "complete") return gen_complete(opt.n);
        return gen_random_max_degree(opt.n, opt.degree_cap, opt.seed);
    }();
    EdgeCorrespondence corr = [&] {
        if (opt.corr == "shift") {
            std::vector<std::pair<EdgeId, EdgeId>> pairs;
            for (const std::string& s : opt.shift) {
                const std::size_t colon = s.find(':');
                if (colon == std::string::npos) {
                    throw Error(Err::parse_error, "--shift takes edge pairs as A:B, got '" + s + "'");
                }
                pairs.emplace_back(static_cast<EdgeId>(std::stoul(s.substr(0, colon))),
                                   static_cast<EdgeId>(std::stoul(s.substr(colon + 1))));
            }
            if (pairs.empty()) pairs.emplace_back(0, g.edge_count() - 1);
            return shift_correspondence(g, opt.q, pairs);
        }
        if (opt.corr == "random") return random_correspondence(g, opt.q, opt.density, opt.seed);
        return identity_correspondence(g, opt.q);
    }();
    emit(opt.out, instance_to_json(g, corr));
    return 0;
}

struct ColourOptions {
    std::string in;
    std::string out;
    std::string trace;
    PipelineConfig config;
};

int run_colour(const ColourOptions& opt) {
    const Instance inst = instance_from_json(read_text_file(opt.in));
    const PipelineResult res = colour_instance(inst.graph, inst.corr, opt.config);

    std::fprintf(stderr, "status: %s\n", pipeline_status_name(res.status));
    std::fprintf(stderr, "schedule: %zu rows, halt %s\n", res.schedule.rows.size(),
                 halt_reason_name(res.schedule.halt));
    std::fprintf(stderr, "iterations: %zu, coloured %zu of %u edges before completion\n",
                 res.nibble.trace.rows.size(), res.nibble.partial.assigned_count(),
                 inst.graph.edge_count());
    if (res.hypothesis) {
        std::fprintf(stderr, "residual: l_min %zu, t_max %zu, margin %s (factor %g)\n",
                     res.hypothesis->l_min, res.hypothesis->t_max,
                     res.hypothesis->ok ? "met" : "not met", res.hypothesis->factor);
    }
    if (res.finisher) {
        std::fprintf(stderr, "completion: %s after %llu resamples\n",
                     res.finisher->success ? "converged" : "hit the resample cap",
                     static_cast<unsigned long long>(res.finisher->resamples));
    }
    if (!res.detail.empty()) std::fprintf(stderr, "detail: %s\n", res.detail.c_str());

    if (!opt.trace.empty()) write_text_file(opt.trace, trace_csv(res.nibble.trace));
    emit(opt.out, colouring_to_json(res.colouring));
    return status_exit_code(res.status);
}

struct SimulateOptions {
    double delta = 1e6;
    double eps = 0.1;
    unsigned k = 2;
    double ratio_threshold = 0.0;
    bool engineering = false;
    double initial_list = 0.0; // engineering; 0 picks (1+eps)*delta
    double ln_factor = 0.0;    // engineering; 0 picks max(ln(delta), 2)
    std::size_t max_iterations = 4;
    double list_floor = 8.0;
    double sigma_slack = 3.5;
    std::string out;
};

int run_simulate(const SimulateOptions& opt) {
    ParamTrajectory tr;
    if (opt.engineering) {
        const double initial =
            opt.initial_list > 0.0 ? opt.initial_list : (1.0 + opt.eps) * opt.delta;
        const double lnF =
            opt.ln_factor > 0.0 ? opt.ln_factor : std::max(std::log(opt.delta), 2.0);
        tr = engineering_trajectory(initial, opt.delta, lnF, opt.max_iterations, opt.list_floor,
                                    opt.sigma_slack);
    } else {
        tr = trajectory(opt.eps, opt.delta, opt.k, opt.ratio_threshold);
    }
    std::fprintf(stderr, "%zu rows, halt %s\n", tr.rows.size(), halt_reason_name(tr.halt));
    if (tr.crossover) std::fprintf(stderr, "ratio crossed the threshold at row %zu\n", *tr.crossover);
    if (tr.progress_failed_at) {
        std::fprintf(stderr, "ratio stopped increasing at row %zu\n", *tr.progress_failed_at);
    }
    if (tr.slack_violation_at) {
        std::fprintf(stderr, "slack term not second-order from row %zu\n", *tr.slack_violation_at);
    }
    emit(opt.out, trajectory_csv(tr));
    return 0;
}

struct OracleOptions {
    std::string in;
    std::string complete;
    std::string witness;
    EdgeId max_edges = 16;
    Colour max_q = 8;
};

int run_oracle(const OracleOptions& opt) {
    const Instance inst = instance_from_json(read_text_file(opt.in));
    const OracleLimits limits{opt.max_edges, opt.max_q};
    OracleDecision dec;
    if (!opt.complete.empty()) {
        const Colouring partial =
            colouring_from_json(read_text_file(opt.complete), inst.graph.edge_count());
        dec = oracle_completion(inst.graph, inst.corr, partial, limits);
    } else {
        dec = oracle_colourable(inst.graph, inst.corr, limits);
    }
    std::printf("%s\n", dec.colourable ? "colourable" : "not_colourable");
    std::fprintf(stderr, "%llu assignments tried\n", static_cast<unsigned long long>(dec.nodes));
    if (dec.colourable && !opt.witness.empty()) {
        write_text_file(opt.witness, colouring_to_json(dec.witness));
    }
    return 0;
}

struct ValidateOptions {
    std::string in;
    std::string colouring;
    bool partial = false;
};

int run_validate(const ValidateOptions& opt) {
    const Instance inst = instance_from_json(read_text_file(opt.in));
    const Colouring col =
        colouring_from_json(read_text_file(opt.colouring), inst.graph.edge_count());
    const ColouringReport rep = opt.partial
                                    ? validate_partial_colouring(inst.graph, inst.corr, col)
                                    : validate_colouring(inst.graph, inst.corr, col);
    if (rep.ok) {
        std::printf("valid\n");
        return 0;
    }
    std::printf("invalid: %s\n", rep.detail.c_str());
    return 5;
}

struct StatsOptions {
    std::vector<std::string> files;
    std::string out;
};

/// Activation probability a schedule row implies, recovered from the row
/// itself: Keep = (1-p)^T gives p, and p = 1/(L * ln_factor) gives the rest.
double implied_activation_prob(const TraceRow& row) {
    if (row.scheduled_tracker <= 0.0 || row.scheduled_keep <= 0.0) return 0.0;
    return -std::expm1(std::log(row.scheduled_keep) / row.scheduled_tracker);
}

int run_stats(const StatsOptions& opt) {
    struct Group {
        std::vector<double> list_means;
        std::vector<double> tprime_gaps; // tprime_mean - bound_factor * tracker_mean
        double predicted_list = 0.0;
        bool have_prediction = false;
    };
    std::map<std::tuple<double, double, std::size_t>, Group> groups;

    for (const std::string& path : opt.files) {
        const RunTrace tr = parse_trace_csv(read_text_file(path));
        for (const TraceRow& row : tr.rows) {
            Group& grp = groups[{tr.delta, tr.eps, row.iteration}];
            grp.list_means.push_back(row.list_mean);
            const double keep = row.scheduled_keep;
            if (!grp.have_prediction) {
                grp.predicted_list = std::ceil(row.scheduled_list - 1e-9) * keep * keep;
                grp.have_prediction = true;
            }
            if (std::isnan(row.tprime_mean)) continue;
            const double p = implied_activation_prob(row);
            const double lnF = p > 0.0 ? 1.0 / (p * row.scheduled_list) : 0.0;
            if (lnF <= 0.0) continue;
            const double bound_factor = (1.0 - (1.0 - tr.eps / 2.0) * keep * keep / lnF) * keep;
            grp.tprime_gaps.push_back(row.tprime_mean - bound_factor * row.tracker_mean);
        }
    }

    std::string out = "delta,eps,i,runs,list_mean,list_predicted,z_list,tprime_gap,z_tprime,flag\n";
    for (const auto& [key, grp] : groups) {
        const auto& [delta, eps, iter] = key;
        const std::size_t runs = grp.list_means.size();
        const double lm = mean_of(grp.list_means);
        const double zl = runs >= 2 ? replicate_z(grp.list_means, grp.predicted_list) : 0.0;
        const double gap = grp.tprime_gaps.empty() ? 0.0 : mean_of(grp.tprime_gaps);
        const double zt = grp.tprime_gaps.size() >= 2 ? replicate_z(grp.tprime_gaps, 0.0) : 0.0;
        const bool flag = std::fabs(zl) > 3.0 || zt > 3.0;
        out += detail::fmt_double(delta);
        out += ',';
        out += detail::fmt_double(eps);
        out += ',';
        out += std::to_string(iter);
        out += ',';
        out += std::to_string(runs);
        out += ',';
        out += detail::fmt_double(lm);
        out += ',';
        out += detail::fmt_double(grp.predicted_list);
        out += ',';
        out += detail::fmt_double(zl);
        out += ',';
        out += detail::fmt_double(gap);
        out += ',';
        out += detail::fmt_double(zt);
        out += ',';
        out += flag ? "1" : "0";
        out += '\n';
    }
    emit(opt.out, out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"list colouring under edge correspondences by semi-random iterations"};
    app.require_subcommand(1);

    GenOptions gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate an instance file");
    gen_cmd->add_option("--graph", gen.graph, "cycle, complete, or random")
        ->check(CLI::IsMember({"cycle", "complete", "random"}));
    gen_cmd->add_option("--n", gen.n, "vertex count");
    gen_cmd->add_option("--degree-cap", gen.degree_cap, "degree cap for random graphs");
    gen_cmd->add_option("--q", gen.q, "palette size");
    gen_cmd->add_option("--corr", gen.corr, "identity, shift, or random")
        ->check(CLI::IsMember({"identity", "shift", "random"}));
    gen_cmd->add_option("--density", gen.density, "matching density for random correspondences");
    gen_cmd->add_option("--shift", gen.shift,
                        "edge pair A:B whose matching is the cyclic shift (repeatable)");
    gen_cmd->add_option("--seed", gen.seed, "random seed");
    gen_cmd->add_option("--out", gen.out, "output file ('-' for stdout)");

    ColourOptions col;
    CLI::App* col_cmd = app.add_subcommand("color", "colour an instance end to end");
    col_cmd->add_option("--in", col.in, "instance file")->required();
    col_cmd->add_option("--out", col.out, "colouring output file ('-' for stdout)");
    col_cmd->add_option("--trace", col.trace, "write the run trace CSV here");
    col_cmd->add_option("--seed", col.config.seed, "random seed");
    col_cmd->add_option("--eps", col.config.eps, "epsilon for schedules and instrumentation");
    col_cmd->add_option("--ln-factor", col.config.ln_factor,
                        "log factor in the activation probability (0: auto)");
    col_cmd->add_option("--retry-limit", col.config.retry_limit, "attempts allowed per iteration");
    col_cmd->add_option("--resample-cap", col.config.resample_cap,
                        "completion redraw budget (0: auto)");
    col_cmd->add_option("--ratio-threshold", col.config.ratio_threshold,
                        "theory-mode halting ratio (0: default)");
    col_cmd->add_flag("--engineering-mode,!--theory-mode", col.config.engineering,
                      "follow realized attrition (default) or the theoretical recursion");
    col_cmd->add_option("--max-iterations", col.config.max_iterations,
                        "engineering-mode iteration cap");
    col_cmd->add_option("--list-floor", col.config.list_floor, "engineering-mode list floor");
    col_cmd->add_option("--sigma-slack", col.config.sigma_slack,
                        "engineering-mode fluctuation margin");
    col_cmd->add_option("--hypothesis-factor", col.config.hypothesis_factor,
                        "residual margin to report on");
    col_cmd->add_flag("--diagnostics", col.config.collect_diagnostics,
                      "collect per-iteration statistics");

    SimulateOptions sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "evaluate a parameter schedule");
    sim_cmd->add_option("--delta", sim.delta, "maximum degree");
    sim_cmd->add_option("--eps", sim.eps, "epsilon");
    sim_cmd->add_option("--k", sim.k, "uniformity");
    sim_cmd->add_option("--ratio-threshold", sim.ratio_threshold, "halting ratio (0: default)");
    sim_cmd->add_flag("--engineering-mode", sim.engineering, "evaluate the engineering schedule");
    sim_cmd->add_option("--initial-list", sim.initial_list,
                        "engineering-mode starting list size (0: (1+eps)*delta)");
    sim_cmd->add_option("--ln-factor", sim.ln_factor,
                        "engineering-mode log factor (0: auto)");
    sim_cmd->add_option("--max-iterations", sim.max_iterations, "engineering-mode iteration cap");
    sim_cmd->add_option("--list-floor", sim.list_floor, "engineering-mode list floor");
    sim_cmd->add_option("--sigma-slack", sim.sigma_slack, "engineering-mode fluctuation margin");
    sim_cmd->add_option("--out", sim.out, "output file ('-' for stdout)");

    OracleOptions orc;
    CLI::App* orc_cmd = app.add_subcommand("oracle", "decide colourability exhaustively");
    orc_cmd->add_option("--in", orc.in, "instance file")->required();
    orc_cmd->add_option("--complete", orc.complete, "partial colouring to extend");
    orc_cmd->add_option("--witness", orc.witness, "write a witness colouring here");
    orc_cmd->add_option("--max-edges", orc.max_edges, "search size limit");
    orc_cmd->add_option("--max-q", orc.max_q, "palette size limit");

    ValidateOptions val;
    CLI::App* val_cmd = app.add_subcommand("validate", "check a colouring file");
    val_cmd->add_option("--in", val.in, "instance file")->required();
    val_cmd->add_option("--colouring", val.colouring, "colouring file")->required();
    val_cmd->add_flag("--partial", val.partial, "allow uncoloured edges");

    StatsOptions sta;
    CLI::App* sta_cmd = app.add_subcommand("stats", "aggregate run traces into replicate statistics");
    sta_cmd->add_option("files", sta.files, "trace CSV files")->required();
    sta_cmd->add_option("--out", sta.out, "output file ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (gen_cmd->parsed()) return run_gen(gen);
        if (col_cmd->parsed()) return run_colour(col);
        if (sim_cmd->parsed()) return run_simulate(sim);
        if (orc_cmd->parsed()) return run_oracle(orc);
        if (val_cmd->parsed()) return run_validate(val);
        if (sta_cmd->parsed()) return run_stats(sta);
    } catch (const nibbledp::Error& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 2;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 0;
}
