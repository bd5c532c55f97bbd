#include <catch2/catch_amalgamated.hpp>

#include "sparsecert/rational.hpp"

using namespace sparsecert;

TEST_CASE("decimal strings parse to exact rationals") {
    CHECK(rational_from_decimal("0.01") == Rational(1, 100));
    CHECK(rational_from_decimal("0.6") == Rational(3, 5));
    CHECK(rational_from_decimal("1") == 1);
    CHECK(rational_from_decimal(".5") == Rational(1, 2));
    CHECK(rational_from_decimal("-0.75") == Rational(-3, 4));
    CHECK(rational_from_decimal("0.000001") == Rational(1, 1000000));
    CHECK(rational_from_decimal("2.") == 2);
}

TEST_CASE("malformed decimals are rejected") {
    CHECK_THROWS_AS(rational_from_decimal(""), ParseError);
    CHECK_THROWS_AS(rational_from_decimal("."), ParseError);
    CHECK_THROWS_AS(rational_from_decimal("1e-3"), ParseError);
    CHECK_THROWS_AS(rational_from_decimal("0.5x"), ParseError);
    CHECK_THROWS_AS(rational_from_decimal("--1"), ParseError);
}

TEST_CASE("pow_int handles negative exponents and zero") {
    CHECK(pow_int(Rational(2, 3), 3) == Rational(8, 27));
    CHECK(pow_int(Rational(2, 3), -2) == Rational(9, 4));
    CHECK(pow_int(Rational(5), 0) == 1);
    CHECK(pow_int(Rational(0), 0) == 1);
    CHECK(pow_int(Rational(0), 4) == 0);
    CHECK_THROWS(pow_int(Rational(0), -1));
}

TEST_CASE("decimal rendering is deterministic and trimmed") {
    CHECK(decimal_string(Rational(0)) == "0");
    CHECK(decimal_string(Rational(1)) == "1");
    CHECK(decimal_string(Rational(1, 2)) == "0.5");
    CHECK(decimal_string(Rational(2, 25)) == "0.08");
    CHECK(decimal_string(Rational(1, 3)) == "0.333333333333");
    CHECK(decimal_string(Rational(2, 3)) == "0.666666666667");
    CHECK(decimal_string(Rational(-1, 5)) == "-0.2");
    CHECK(decimal_string(Rational(1234567)) == "1234567");
    CHECK(decimal_string(Rational(1, 10000)) == "0.0001");
    CHECK(decimal_string(Rational(1, 100000)) == "1e-5");
    CHECK(decimal_string(Rational(Integer("999999999999999"))) == "1e15");  // rounds up at 12 digits
    CHECK(decimal_string(Rational(1, 3), 4) == "0.3333");
}

TEST_CASE("rendering round-trips through parsing at full precision") {
    Rational q(7, 13);
    Rational back = rational_from_decimal(decimal_string(q, 30));
    CHECK(abs(back - q) < Rational(1, Integer("1000000000000000000000000000")));
}
