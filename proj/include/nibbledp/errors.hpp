#pragma once

#include <stdexcept>
#include <string>

namespace nibbledp {

/// Error categories raised by the library. Operations that treat failure as a
/// reportable outcome (retry exhaustion, resample caps, validation verdicts)
/// return result structs instead; these codes cover contract violations and
/// rejected inputs.
enum class Err {
    loop_edge,
    duplicate_edge,
    vertex_out_of_range,
    invalid_size,
    not_an_endpoint,
    not_incident,
    not_a_cycle,
    invalid_correspondence,
    list_too_short,
    probability_overflow,
    schedule_empty,
    empty_residual_list,
    too_large,
    invalid_partial,
    domain_error,
    parse_error,
};

inline const char* err_name(Err e) {
    switch (e) {
        case Err::loop_edge: return "LoopEdge";
        case Err::duplicate_edge: return "DuplicateEdge";
        case Err::vertex_out_of_range: return "VertexOutOfRange";
        case Err::invalid_size: return "InvalidSize";
        case Err::not_an_endpoint: return "NotAnEndpoint";
        case Err::not_incident: return "NotIncident";
        case Err::not_a_cycle: return "NotACycle";
        case Err::invalid_correspondence: return "InvalidCorrespondence";
        case Err::list_too_short: return "ListTooShort";
        case Err::probability_overflow: return "ProbabilityOverflow";
        case Err::schedule_empty: return "ScheduleEmpty";
        case Err::empty_residual_list: return "EmptyResidualList";
        case Err::too_large: return "TooLarge";
        case Err::invalid_partial: return "InvalidPartial";
        case Err::domain_error: return "DomainError";
        case Err::parse_error: return "ParseError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
  public:
    Error(Err code, const std::string& what)
        : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}

    Err code() const noexcept { return code_; }

  private:
    Err code_;
};

} // namespace nibbledp
