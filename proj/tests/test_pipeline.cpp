#include "doctest.h"

#include "nibbledp/pipeline.hpp"
#include "nibbledp/trace.hpp"

using namespace nibbledp;

TEST_CASE("a shifted cycle colours and validates end to end") {
    SimpleGraph g = gen_cycle(4);
    EdgeCorrespondence corr = shift_correspondence(g, 3, {{0, 3}});
    PipelineResult res = colour_instance(g, corr, {});
    REQUIRE(res.status == PipelineStatus::success);
    CHECK(validate_colouring(g, corr, res.colouring).ok);
    CHECK(res.nibble.trace.finisher_ran);
    CHECK(res.nibble.trace.finisher_success);
    REQUIRE(res.hypothesis.has_value());
    CHECK(res.hypothesis->t_max >= 1);
}

TEST_CASE("a sparse random instance colours and validates") {
    SimpleGraph g = gen_random_max_degree(60, 5, 81);
    EdgeCorrespondence corr = random_correspondence(g, 12, 1.0, 82);
    PipelineConfig pc;
    pc.seed = 5;
    PipelineResult res = colour_instance(g, corr, pc);
    REQUIRE(res.status == PipelineStatus::success);
    CHECK(validate_colouring(g, corr, res.colouring).ok);
    CHECK(res.schedule.engineering);
    // desk scale schedules stop before the first round, so the finisher
    // carries the whole instance
    CHECK(res.nibble.trace.rows.empty());
}

TEST_CASE("a hopeless dense instance reports the cap honestly") {
    SimpleGraph g = gen_complete(6);
    EdgeCorrespondence corr = identity_correspondence(g, 2);
    PipelineConfig pc;
    pc.resample_cap = 50;
    PipelineResult res = colour_instance(g, corr, pc);
    CHECK(res.status == PipelineStatus::resample_cap_exceeded);
    CHECK_FALSE(res.colouring.complete());
    REQUIRE(res.finisher.has_value());
    CHECK(res.finisher->resamples == 50);
}

TEST_CASE("theory mode drives the engine through real iterations") {
    // delta 30 is small enough to run yet large enough that the theory
    // recursion emits a second row before draining
    SimpleGraph g = gen_random_max_degree(60, 30, 91);
    EdgeCorrespondence corr = identity_correspondence(g, 40);
    PipelineConfig pc;
    pc.engineering = false;
    pc.eps = 0.2;
    pc.seed = 3;
    pc.resample_cap = 50000;
    PipelineResult res = colour_instance(g, corr, pc);
    CHECK_FALSE(res.schedule.engineering);
    CHECK(res.schedule.eps == 0.2);
    CHECK(res.schedule.rows.size() == 2);
    CHECK(res.nibble.trace.rows.size() == 1);
    CHECK(res.nibble.trace.rows[0].newly_retained > 0);
    if (res.status == PipelineStatus::success) {
        CHECK(validate_colouring(g, corr, res.colouring).ok);
    }
}

TEST_CASE("pipeline results are seed deterministic") {
    SimpleGraph g = gen_random_max_degree(40, 4, 101);
    EdgeCorrespondence corr = random_correspondence(g, 10, 1.0, 102);
    PipelineConfig pc;
    pc.seed = 77;
    PipelineResult a = colour_instance(g, corr, pc);
    PipelineResult b = colour_instance(g, corr, pc);
    CHECK(a.status == b.status);
    CHECK(trace_csv(a.nibble.trace) == trace_csv(b.nibble.trace));
    REQUIRE(a.colouring.colour.size() == b.colouring.colour.size());
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        CHECK(a.colouring.colour[e] == b.colouring.colour[e]);
    }
}

TEST_CASE("an empty graph succeeds with nothing to do") {
    SimpleGraph g = SimpleGraph::build(5, {});
    EdgeCorrespondence corr = identity_correspondence(g, 2);
    PipelineResult res = colour_instance(g, corr, {});
    CHECK(res.status == PipelineStatus::success);
    CHECK(res.colouring.complete());
}

TEST_CASE("status names are stable strings") {
    CHECK(std::string(pipeline_status_name(PipelineStatus::success)) == "success");
    CHECK(std::string(pipeline_status_name(PipelineStatus::retry_exhausted)) ==
          "retry_exhausted");
    CHECK(std::string(pipeline_status_name(PipelineStatus::empty_residual)) == "empty_residual");
    CHECK(std::string(pipeline_status_name(PipelineStatus::resample_cap_exceeded)) ==
          "resample_cap_exceeded");
    CHECK(std::string(pipeline_status_name(PipelineStatus::validation_failed)) ==
          "validation_failed");
}

TEST_CASE("config knobs reach the schedule") {
    SimpleGraph g = gen_cycle(6);
    EdgeCorrespondence corr = identity_correspondence(g, 3);
    PipelineConfig pc;
    pc.ln_factor = 4.0;
    pc.max_iterations = 2;
    pc.list_floor = 1.0;
    pc.sigma_slack = 0.0;
    PipelineResult res = colour_instance(g, corr, pc);
    CHECK(res.schedule.ln_factor == 4.0);
    // floor 1 and no slack let the schedule keep both rows
    CHECK(res.schedule.rows.size() >= 2);
}
