#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "sparsecert/votes_io.hpp"

using namespace sparsecert;

TEST_CASE("votes files round-trip") {
    io::VotesFile file;
    file.num_classes = 3;
    file.num_selection = 10;
    file.num_estimation = 20;
    file.records.push_back({VoteRecord{"a", {7, 2, 1}}, VoteRecord{"a", {15, 4, 1}}});
    file.records.push_back({VoteRecord{"b", {0, 10, 0}}, VoteRecord{"b", {1, 19, 0}}});

    std::stringstream buffer;
    io::write_votes(buffer, file);
    io::VotesFile back = io::read_votes(buffer);
    CHECK(back.num_classes == 3);
    CHECK(back.num_selection == 10);
    CHECK(back.num_estimation == 20);
    REQUIRE(back.records.size() == 2);
    CHECK(back.records[0].first.input_id == "a");
    CHECK(back.records[0].first.counts == std::vector<std::uint64_t>{7, 2, 1});
    CHECK(back.records[1].second.counts == std::vector<std::uint64_t>{1, 19, 0});
}

TEST_CASE("votes parser reports the offending line") {
    auto expect_error = [](const std::string& text, const std::string& fragment) {
        std::stringstream in(text);
        try {
            io::read_votes(in);
            FAIL("expected ParseError for: " << text);
        } catch (const ParseError& e) {
            CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring(fragment));
        }
    };
    expect_error("", "header");
    expect_error("classes=2 selection=5\n", "header");
    expect_error("classes=2 selection=5 estimation=5\nx 4 1 | 5 1\n", "line 2");
    expect_error("classes=2 selection=5 estimation=5\nx 4 1 5 0\n", "'|'");
    expect_error("classes=2 selection=5 estimation=5\nx 4 one | 5 0\n", "nonnegative integer");
    expect_error("classes=2 selection=5 estimation=5\nx 4 1 | 5 0 9\n", "trailing");
    expect_error("# comment only\nclasses=0 selection=1 estimation=1\n", "positive");
}

TEST_CASE("comments and blank lines are ignored") {
    std::stringstream in("# votes\n\nclasses=2 selection=3 estimation=3\n# record\nx 2 1 | 3 0\n");
    io::VotesFile file = io::read_votes(in);
    REQUIRE(file.records.size() == 1);
    CHECK(file.records[0].first.counts == std::vector<std::uint64_t>{2, 1});
}

TEST_CASE("results csv renders rationals at 12 significant digits") {
    io::ResultRow row;
    row.cert.input_id = "n1";
    row.cert.radii = RadiiSpec(2, 3, 0);
    row.cert.certified = true;
    row.cert.rho_or_margin = Rational(2, 3);
    row.cert.mode = Mode::multi_class;
    row.bounds.p_lower = Rational(1, 3);
    row.bounds.p_upper_runner = Rational(1, 7);

    std::stringstream out;
    io::write_results_csv(out, {row});
    std::string text = out.str();
    CHECK_THAT(text, Catch::Matchers::ContainsSubstring(
                         "id,mode,p_lower,runner_upper,ra,rd,rc,rho_or_margin,certified,abstained"));
    CHECK_THAT(text, Catch::Matchers::ContainsSubstring(
                         "n1,multi,0.333333333333,0.142857142857,2,3,0,0.666666666667,1,0"));

    SECTION("fallback and joint columns") {
        row.cert.binary_fallback = true;
        std::stringstream joint_out;
        io::write_results_csv(joint_out, {row}, RadiiSpec(4, 5, 0));
        CHECK_THAT(joint_out.str(), Catch::Matchers::ContainsSubstring(",ra_b,rd_b"));
        CHECK_THAT(joint_out.str(), Catch::Matchers::ContainsSubstring("multi_fallback"));
        CHECK_THAT(joint_out.str(), Catch::Matchers::ContainsSubstring(",4,5"));
    }
}
