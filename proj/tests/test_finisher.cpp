#include "doctest.h"

#include "nibbledp/finisher.hpp"

#include <set>

using namespace nibbledp;

namespace {

SimpleGraph path3() { return SimpleGraph::build(3, {{0, 1}, {1, 2}}); }

// check the finisher output against the restricted matchings by hand
bool residual_valid(const ResidualInstance& r, const std::vector<Colour>& colours) {
    for (const ResidualPair& pr : r.pairs) {
        for (const MatchPair& mp : pr.pairs) {
            if (colours[pr.a] == mp.first && colours[pr.b] == mp.second) return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("a fresh state yields the whole instance as residual") {
    SimpleGraph g = gen_cycle(5);
    EdgeCorrespondence corr = identity_correspondence(g, 4);
    NibbleState st = init_state(g, corr);
    ResidualInstance r = build_residual(st, g, corr);
    CHECK(r.q == 4);
    CHECK(r.edges == std::vector<EdgeId>{0, 1, 2, 3, 4});
    for (const auto& lst : r.lists) CHECK(lst.size() == 4);
    CHECK(r.pairs.size() == 5);
    CHECK(r.l_min == 4);
    // identity matchings expose each colour once per incident pair, and a
    // cycle edge has one neighbour per endpoint
    CHECK(r.t_max == 2);
}

TEST_CASE("committed neighbours prune the residual lists") {
    SimpleGraph g = path3();
    EdgeCorrespondence corr = identity_correspondence(g, 3);
    NibbleState st = init_state(g, corr);
    st.final_colour[0] = 2;
    ResidualInstance r = build_residual(st, g, corr);
    REQUIRE(r.edges == std::vector<EdgeId>{1});
    // colour 2 would realize the identity pair against the committed edge
    CHECK(r.lists[0] == std::vector<Colour>{1, 3});
    CHECK(r.pairs.empty());
    CHECK(r.t_max == 0);
}

TEST_CASE("pruning everything raises an error") {
    SimpleGraph g = path3();
    EdgeCorrespondence corr = identity_correspondence(g, 1);
    NibbleState st = init_state(g, corr);
    st.final_colour[0] = 1;
    CHECK_THROWS_WITH_AS(static_cast<void>(build_residual(st, g, corr)),
                         doctest::Contains("EmptyResidualList"), Error);
}

TEST_CASE("residual matchings are restricted to surviving colours") {
    SimpleGraph g = path3();
    EdgeCorrespondence corr = identity_correspondence(g, 4);
    NibbleState st = init_state(g, corr);
    st.list[0].reset(2);
    st.list[1].reset(3);
    ResidualInstance r = build_residual(st, g, corr);
    REQUIRE(r.pairs.size() == 1);
    // identity entries survive only where both sides still hold the colour
    CHECK(r.pairs[0].pairs == std::vector<MatchPair>{{1, 1}, {4, 4}});
    CHECK(r.l_min == 3);
    CHECK(r.t_max == 1);
}

TEST_CASE("t_max counts appearances per edge and colour across pairs") {
    // star: three edges meet at vertex 0, so each colour of one edge is
    // exposed once per neighbour under identity matchings
    SimpleGraph g = SimpleGraph::build(4, {{0, 1}, {0, 2}, {0, 3}});
    EdgeCorrespondence corr = identity_correspondence(g, 5);
    NibbleState st = init_state(g, corr);
    ResidualInstance r = build_residual(st, g, corr);
    CHECK(r.t_max == 2);
    CHECK(check_hypothesis(r, 2.0).ok);
    CHECK_FALSE(check_hypothesis(r, 8.0).ok);
    HypothesisReport rep = check_hypothesis(r);
    CHECK(rep.l_min == 5);
    CHECK(rep.t_max == 2);
}

TEST_CASE("an empty residual completes vacuously") {
    ResidualInstance r;
    r.q = 3;
    CHECK(check_hypothesis(r).ok);
    FinisherResult res = complete_colouring(r, 1, 100);
    CHECK(res.success);
    CHECK(res.resamples == 0);
    CHECK(res.colours.empty());
}

TEST_CASE("an unsatisfiable residual stops at the cap") {
    // two edges, one colour each, and the matching forbids the only option
    ResidualInstance r;
    r.q = 1;
    r.edges = {0, 1};
    r.lists = {{1}, {1}};
    r.pairs.push_back({0, 1, {{1, 1}}});
    r.t_max = 1;
    r.l_min = 1;
    FinisherResult res = complete_colouring(r, 7, 25);
    CHECK_FALSE(res.success);
    CHECK(res.resamples == 25);
    CHECK(res.remaining_violations == 1);
}

TEST_CASE("a loose residual converges and validates") {
    // degree cap 3 exposes a colour at most 4 times, and 32 >= 8 * 4
    SimpleGraph g = gen_random_max_degree(30, 3, 51);
    EdgeCorrespondence corr = random_correspondence(g, 32, 1.0, 52);
    NibbleState st = init_state(g, corr);
    ResidualInstance r = build_residual(st, g, corr);
    REQUIRE(r.l_min >= 8 * r.t_max);
    FinisherResult res = complete_colouring(r, 53, 100 * r.edges.size());
    REQUIRE(res.success);
    CHECK(res.remaining_violations == 0);
    CHECK(residual_valid(r, res.colours));
    for (std::size_t i = 0; i < r.edges.size(); ++i) {
        CHECK(std::binary_search(r.lists[i].begin(), r.lists[i].end(), res.colours[i]));
    }
}

TEST_CASE("the finisher is seed deterministic") {
    SimpleGraph g = gen_random_max_degree(20, 3, 61);
    EdgeCorrespondence corr = random_correspondence(g, 20, 1.0, 62);
    NibbleState st = init_state(g, corr);
    ResidualInstance r = build_residual(st, g, corr);
    std::vector<std::size_t> log1, log2;
    FinisherResult a = complete_colouring(r, 9, 1000, &log1);
    FinisherResult b = complete_colouring(r, 9, 1000, &log2);
    CHECK(a.success == b.success);
    CHECK(a.resamples == b.resamples);
    CHECK(a.colours == b.colours);
    CHECK(log1 == log2);
}

TEST_CASE("resamples follow the lowest violated pair first") {
    // force one violation; the log must name that pair exactly once if the
    // redraw fixes it
    ResidualInstance r;
    r.q = 8;
    r.edges = {0, 1};
    r.lists = {{1, 2, 3, 4, 5, 6, 7, 8}, {1, 2, 3, 4, 5, 6, 7, 8}};
    std::vector<MatchPair> full;
    for (Colour c = 1; c <= 8; ++c) full.push_back({c, c});
    r.pairs.push_back({0, 1, full});
    r.t_max = 1;
    r.l_min = 8;
    std::vector<std::size_t> log;
    FinisherResult res = complete_colouring(r, 3, 1000, &log);
    CHECK(res.success);
    CHECK(res.resamples == log.size());
    for (std::size_t v : log) CHECK(v == 0);
    CHECK(res.colours[0] != res.colours[1]);
}
