#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sparsecert/confidence.hpp"

using namespace sparsecert;

TEST_CASE("binary bounds") {
    Rational alpha(1, 100);
    SECTION("unanimous votes hit the closed form") {
        VoteRecord votes{"x", {1000, 0}};
        ClassBounds b = confidence::binary_bounds(votes, alpha);
        CHECK(b.top_class == 0);
        CHECK(b.mode == Mode::binary_class);
        CHECK(std::abs(to_double(b.p_lower) - std::pow(0.01, 1.0 / 1000)) < 1e-10);
        CHECK(b.p_upper_runner == 1 - b.p_lower);
    }
    SECTION("ties break to the smallest class id") {
        VoteRecord votes{"x", {500, 500}};
        ClassBounds b = confidence::binary_bounds(votes, alpha);
        CHECK(b.top_class == 0);
        CHECK(b.p_lower < Rational(1, 2));
    }
    SECTION("bound matches clopper-pearson directly") {
        VoteRecord votes{"x", {990, 10}};
        ClassBounds b = confidence::binary_bounds(votes, alpha);
        CHECK(b.p_lower == exactmath::clopper_pearson_lower(990, 1000, alpha));
    }
    SECTION("empty votes are rejected") {
        VoteRecord votes{"x", {0, 0}};
        CHECK_THROWS_AS(confidence::binary_bounds(votes, alpha), EmptyVotes);
    }
}

TEST_CASE("multi-class bounds use bonferroni-corrected intervals") {
    Rational alpha(1, 100);
    SECTION("per-class bounds are the single-class bounds at alpha/C") {
        VoteRecord votes{"x", {998, 1, 1}};
        ClassBounds b = confidence::multiclass_bounds(votes, alpha, 3);
        Rational corrected = alpha / 3;
        CHECK(b.top_class == 0);
        CHECK(b.p_lower == exactmath::clopper_pearson_lower(998, 1000, corrected));
        CHECK(b.p_upper_runner == exactmath::clopper_pearson_upper(1, 1000, corrected));
    }
    SECTION("one-class votes bound the runner by the zero-count interval") {
        VoteRecord votes{"x", {1000, 0, 0, 0}};
        ClassBounds b = confidence::multiclass_bounds(votes, alpha, 4);
        Rational corrected = alpha / 4;
        CHECK(b.p_upper_runner == exactmath::clopper_pearson_upper(0, 1000, corrected));
        CHECK(std::abs(to_double(b.p_upper_runner) - (1 - std::pow(to_double(corrected), 1.0 / 1000))) < 1e-10);
    }
    SECTION("multi p_lower is looser than binary at equal counts") {
        for (std::uint64_t k : {600ull, 900ull, 990ull, 1000ull}) {
            VoteRecord votes{"x", {k, 1000 - k}};
            CHECK(confidence::multiclass_bounds(votes, alpha, 2).p_lower <=
                  confidence::binary_bounds(votes, alpha).p_lower);
        }
    }
    SECTION("declared class count must cover the record") {
        VoteRecord votes{"x", {5, 5, 5}};
        CHECK_THROWS_AS(confidence::multiclass_bounds(votes, alpha, 2), CategoryError);
    }
}

TEST_CASE("two-stage estimation") {
    Rational alpha(1, 100);
    SECTION("selection picks the class, estimation bounds it") {
        VoteRecord selection{"x", {800, 200}};
        VoteRecord estimation{"x", {300, 700}};  // the selected class is now a minority
        ClassBounds b = confidence::two_stage_estimate(selection, estimation, alpha, Mode::binary_class);
        CHECK(b.top_class == 0);
        CHECK(b.p_lower < Rational(1, 2));  // will abstain downstream
    }
    SECTION("identical records reproduce binary_bounds") {
        VoteRecord votes{"x", {950, 50}};
        ClassBounds two = confidence::two_stage_estimate(votes, votes, alpha, Mode::binary_class);
        ClassBounds one = confidence::binary_bounds(votes, alpha);
        CHECK(two.top_class == one.top_class);
        CHECK(two.p_lower == one.p_lower);
    }
    SECTION("multi mode bounds the runner from the estimation record") {
        VoteRecord selection{"x", {10, 2, 1}};
        VoteRecord estimation{"x", {900, 80, 20}};
        ClassBounds b = confidence::two_stage_estimate(selection, estimation, alpha, Mode::multi_class);
        CHECK(b.top_class == 0);
        CHECK(b.p_upper_runner == exactmath::clopper_pearson_upper(80, 1000, alpha / 3));
    }
    SECTION("empty stages are rejected") {
        VoteRecord ok{"x", {10, 0}};
        VoteRecord empty{"x", {0, 0}};
        CHECK_THROWS_AS(confidence::two_stage_estimate(empty, ok, alpha, Mode::binary_class), EmptyVotes);
        CHECK_THROWS_AS(confidence::two_stage_estimate(ok, empty, alpha, Mode::binary_class), EmptyVotes);
    }
}
