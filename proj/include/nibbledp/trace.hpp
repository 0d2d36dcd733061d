#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "nibbledp/errors.hpp"
#include "nibbledp/format.hpp"

namespace nibbledp {

/// One executed engine iteration. Scheduled values come from the parameter
/// row that drove the iteration; realized list statistics are taken after the
/// iteration's removals (before any truncation for the next row) over edges
/// still uncoloured; tracker statistics are taken after the post-iteration
/// recompute. tprime_mean is NaN when the run was not instrumented.
struct TraceRow {
    std::size_t iteration = 0;
    double scheduled_list = 0.0;
    double scheduled_tracker = 0.0;
    double scheduled_keep = 0.0;
    std::size_t list_min = 0;
    double list_mean = 0.0;
    std::size_t tracker_max = 0;
    double tracker_mean = 0.0;
    double tprime_mean = 0.0;
    std::size_t newly_retained = 0;
    std::size_t uncoloured = 0;
    std::size_t retries = 0;
};

/// Full record of one engine run plus (when the pipeline ran it) the
/// finishing stage.
struct RunTrace {
    std::uint64_t seed = 0;
    double eps = 0.0;
    double delta = 0.0;
    std::string halt; // halt reason name of the schedule that drove the run
    bool finisher_ran = false;
    std::uint64_t finisher_resamples = 0;
    bool finisher_success = false;
    std::vector<TraceRow> rows;
};

/// CSV export. Run-level fields ride as leading "# key,value" lines so one
/// file is self-contained; doubles print in round-trip form, making
/// export -> import -> export byte-identical.
inline std::string trace_csv(const RunTrace& t) {
    std::string out;
    out += "# seed," + std::to_string(t.seed) + "\n";
    out += "# eps," + detail::fmt_double(t.eps) + "\n";
    out += "# delta," + detail::fmt_double(t.delta) + "\n";
    out += "# halt," + t.halt + "\n";
    out += "# finisher_ran," + std::to_string(t.finisher_ran ? 1 : 0) + "\n";
    out += "# finisher_resamples," + std::to_string(t.finisher_resamples) + "\n";
    out += "# finisher_success," + std::to_string(t.finisher_success ? 1 : 0) + "\n";
    out += "i,L_i,T_i,Keep_i,list_min,list_mean,tracker_max,tracker_mean,tprime_mean,"
           "newly_retained,uncoloured,retries\n";
    for (const auto& r : t.rows) {
        out += std::to_string(r.iteration);
        out += ',';
        out += detail::fmt_double(r.scheduled_list);
        out += ',';
        out += detail::fmt_double(r.scheduled_tracker);
        out += ',';
        out += detail::fmt_double(r.scheduled_keep);
        out += ',';
        out += std::to_string(r.list_min);
        out += ',';
        out += detail::fmt_double(r.list_mean);
        out += ',';
        out += std::to_string(r.tracker_max);
        out += ',';
        out += detail::fmt_double(r.tracker_mean);
        out += ',';
        out += detail::fmt_double(r.tprime_mean);
        out += ',';
        out += std::to_string(r.newly_retained);
        out += ',';
        out += std::to_string(r.uncoloured);
        out += ',';
        out += std::to_string(r.retries);
        out += '\n';
    }
    return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline double parse_double(const std::string& s, const char* what) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw Error(Err::parse_error, std::string(what) + ": bad number '" + s + "'");
    }
    return v;
}

inline std::uint64_t parse_u64(const std::string& s, const char* what) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') {
        throw Error(Err::parse_error, std::string(what) + ": bad integer '" + s + "'");
    }
    return v;
}

} // namespace detail

/// Parse a trace produced by trace_csv. The field layout is fixed; anything
/// else raises ParseError with the offending line.
inline RunTrace parse_trace_csv(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    const char* preamble[] = {"# seed",     "# eps",
                              "# delta",    "# halt",
                              "# finisher_ran", "# finisher_resamples",
                              "# finisher_success"};
    if (lines.size() < 8) throw Error(Err::parse_error, "trace: missing preamble or header");
    RunTrace t;
    std::vector<std::string> vals;
    for (std::size_t i = 0; i < 7; ++i) {
        auto fields = detail::split_csv_line(lines[i]);
        if (fields.size() != 2 || fields[0] != preamble[i]) {
            throw Error(Err::parse_error, "trace line " + std::to_string(i + 1) + ": expected '" +
                                              preamble[i] + ",<value>', got '" + lines[i] + "'");
        }
        vals.push_back(fields[1]);
    }
    t.seed = detail::parse_u64(vals[0], "seed");
    t.eps = detail::parse_double(vals[1], "eps");
    t.delta = detail::parse_double(vals[2], "delta");
    t.halt = vals[3];
    t.finisher_ran = detail::parse_u64(vals[4], "finisher_ran") != 0;
    t.finisher_resamples = detail::parse_u64(vals[5], "finisher_resamples");
    t.finisher_success = detail::parse_u64(vals[6], "finisher_success") != 0;
    const std::string header =
        "i,L_i,T_i,Keep_i,list_min,list_mean,tracker_max,tracker_mean,tprime_mean,"
        "newly_retained,uncoloured,retries";
    if (lines[7] != header) throw Error(Err::parse_error, "trace: bad header row '" + lines[7] + "'");
    for (std::size_t i = 8; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = detail::split_csv_line(lines[i]);
        if (f.size() != 12) {
            throw Error(Err::parse_error,
                        "trace line " + std::to_string(i + 1) + ": expected 12 fields, got " +
                            std::to_string(f.size()));
        }
        TraceRow r;
        r.iteration = static_cast<std::size_t>(detail::parse_u64(f[0], "i"));
        r.scheduled_list = detail::parse_double(f[1], "L_i");
        r.scheduled_tracker = detail::parse_double(f[2], "T_i");
        r.scheduled_keep = detail::parse_double(f[3], "Keep_i");
        r.list_min = static_cast<std::size_t>(detail::parse_u64(f[4], "list_min"));
        r.list_mean = detail::parse_double(f[5], "list_mean");
        r.tracker_max = static_cast<std::size_t>(detail::parse_u64(f[6], "tracker_max"));
        r.tracker_mean = detail::parse_double(f[7], "tracker_mean");
        r.tprime_mean = detail::parse_double(f[8], "tprime_mean");
        r.newly_retained = static_cast<std::size_t>(detail::parse_u64(f[9], "newly_retained"));
        r.uncoloured = static_cast<std::size_t>(detail::parse_u64(f[10], "uncoloured"));
        r.retries = static_cast<std::size_t>(detail::parse_u64(f[11], "retries"));
        t.rows.push_back(r);
    }
    return t;
}

} // namespace nibbledp
