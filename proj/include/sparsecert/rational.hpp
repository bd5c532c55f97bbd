#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cstdint>
#include <string>

#include "sparsecert/errors.hpp"

namespace sparsecert {

// All probability arithmetic is exact. Rationals enter the engine either as
// decimal strings (CLI) or as dyadic values recovered from bisection; they
// never pass through binary floating point on the way in.
using Rational = mpq_class;
using Integer = mpz_class;

// num/den in canonical form. The raw two-argument mpq_class constructor does
// not canonicalize, which silently breaks comparisons; route fractions with
// possibly shared factors through here.
inline Rational make_rational(const Integer& num, const Integer& den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Parses a plain decimal fraction ("0.25", "1", ".5", "-0.75") into an exact
// rational. Scientific notation is rejected: the CLI surface is decimal-only.
inline Rational rational_from_decimal(const std::string& text) {
    if (text.empty()) throw ParseError("empty decimal string");
    std::size_t pos = 0;
    bool negative = false;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = (text[pos] == '-');
        ++pos;
    }
    std::string int_part, frac_part;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) int_part.push_back(text[pos++]);
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) frac_part.push_back(text[pos++]);
    }
    if (pos != text.size() || (int_part.empty() && frac_part.empty()))
        throw ParseError("malformed decimal string: '" + text + "'");

    Integer num(int_part.empty() ? std::string("0") : int_part);
    Integer den = 1;
    for (char c : frac_part) {
        num *= 10;
        num += (c - '0');
        den *= 10;
    }
    Rational q(num, den);
    q.canonicalize();
    if (negative) q = -q;
    return q;
}

// q^e with integer (possibly negative) exponent. 0^0 = 1 by convention.
inline Rational pow_int(const Rational& base, long exponent) {
    if (exponent == 0) return Rational(1);
    bool invert = exponent < 0;
    unsigned long e = invert ? static_cast<unsigned long>(-exponent) : static_cast<unsigned long>(exponent);
    if (base == 0) {
        if (invert) throw InternalError("pow_int: zero base with negative exponent");
        return Rational(0);
    }
    Integer num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), e);
    mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), e);
    Rational out = invert ? Rational(den, num) : Rational(num, den);
    out.canonicalize();
    return out;
}

namespace detail {

// floor(a * 10^k + 1/2) for a >= 0, k any sign.
inline Integer scaled_half_up(const Rational& a, long k) {
    Integer num = a.get_num();
    Integer den = a.get_den();
    Integer p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(k >= 0 ? k : -k));
    if (k >= 0)
        num *= p10;
    else
        den *= p10;
    // floor((2*num + den) / (2*den))
    Integer out;
    Integer t = 2 * num + den;
    Integer b = 2 * den;
    mpz_fdiv_q(out.get_mpz_t(), t.get_mpz_t(), b.get_mpz_t());
    return out;
}

}  // namespace detail

// Deterministic decimal rendering with `sig` significant digits (half-up),
// trailing zeros trimmed. Presentation only; comparisons stay rational.
inline std::string decimal_string(const Rational& value, int sig = 12) {
    if (sig < 1) sig = 1;
    if (value == 0) return "0";
    Rational a = value < 0 ? Rational(-value) : value;

    // decimal exponent: 10^e <= a < 10^(e+1)
    long e = static_cast<long>(mpz_sizeinbase(a.get_num().get_mpz_t(), 10)) -
             static_cast<long>(mpz_sizeinbase(a.get_den().get_mpz_t(), 10));
    while (a >= pow_int(Rational(10), e + 1)) ++e;
    while (a < pow_int(Rational(10), e)) --e;

    Integer mant = detail::scaled_half_up(a, sig - 1 - e);
    Integer limit;
    mpz_ui_pow_ui(limit.get_mpz_t(), 10, static_cast<unsigned long>(sig));
    if (mant >= limit) {  // rounding carried into a new leading digit
        mant /= 10;
        ++e;
    }
    std::string digits = mant.get_str();

    std::string body;
    if (e >= 0 && e < sig + 3) {
        // plain notation, possibly padding zeros on the right
        std::string ip = digits.substr(0, std::min<std::size_t>(digits.size(), e + 1));
        while (static_cast<long>(ip.size()) < e + 1) ip.push_back('0');
        std::string fp = static_cast<long>(digits.size()) > e + 1 ? digits.substr(e + 1) : "";
        while (!fp.empty() && fp.back() == '0') fp.pop_back();
        body = fp.empty() ? ip : ip + "." + fp;
    } else if (e < 0 && e >= -4) {
        std::string fp(static_cast<std::size_t>(-e - 1), '0');
        fp += digits;
        while (!fp.empty() && fp.back() == '0') fp.pop_back();
        body = "0." + fp;
    } else {
        std::string fp = digits.substr(1);
        while (!fp.empty() && fp.back() == '0') fp.pop_back();
        body = digits.substr(0, 1) + (fp.empty() ? "" : "." + fp) + "e" + std::to_string(e);
    }
    return value < 0 ? "-" + body : body;
}

inline double to_double(const Rational& q) { return mpq_get_d(q.get_mpq_t()); }

}  // namespace sparsecert
