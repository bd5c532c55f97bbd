#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "sparsecert/errors.hpp"
#include "sparsecert/rational.hpp"

namespace sparsecert::exactmath {

// Two-group Poisson-Binomial: n_a trials at p_a plus n_b trials at p_b.
struct PBParams {
    Rational p_a;
    long n_a = 0;
    Rational p_b;
    long n_b = 0;

    PBParams(Rational pa, long na, Rational pb, long nb)
        : p_a(std::move(pa)), n_a(na), p_b(std::move(pb)), n_b(nb) {
        if (n_a < 0 || n_b < 0) throw RangeError("PB group sizes must be nonnegative");
        if (p_a < 0 || p_a > 1 || p_b < 0 || p_b > 1) throw RangeError("PB probabilities outside [0,1]");
    }
};

// PMF of PB([p_a,n_a],[p_b,n_b]) over q = 0..n_a+n_b, exact.
//
// Uses the odds-ratio recursion
//   T(i) = n_a*(p_a/(1-p_a))^i + n_b*(p_b/(1-p_b))^i
//   R(q) = (1/q) * sum_{i=1..q} (-1)^{i+1} T(i) R(q-i),  R(0) = 1
//   PB(q) = R(q) * (1-p_a)^{n_a} * (1-p_b)^{n_b}
// unrolled with dynamic programming. The alternating signs make this
// unusable in floating point; in exact rationals it is fine. Groups with
// p = 1 contribute a deterministic shift, groups with p = 0 contribute
// nothing; both bypass the recursion (their odds are degenerate).
inline std::vector<Rational> pb_pmf(const PBParams& params) {
    const long out_len = params.n_a + params.n_b + 1;
    std::vector<Rational> pmf(static_cast<std::size_t>(out_len), Rational(0));

    long shift = 0;
    std::vector<std::pair<Rational, long>> groups;  // (p, n) with 0 < p < 1, n > 0
    for (auto& [p, n] : {std::pair<Rational, long>{params.p_a, params.n_a}, {params.p_b, params.n_b}}) {
        if (n == 0 || p == 0) continue;
        if (p == 1) {
            shift += n;
            continue;
        }
        groups.emplace_back(p, n);
    }

    long m = 0;
    Rational scale(1);
    for (auto& [p, n] : groups) {
        m += n;
        scale *= pow_int(1 - p, n);
    }

    std::vector<Rational> t(static_cast<std::size_t>(m + 1), Rational(0));
    for (auto& [p, n] : groups) {
        Rational odds = p / (1 - p);
        Rational power(1);
        for (long i = 1; i <= m; ++i) {
            power *= odds;
            t[static_cast<std::size_t>(i)] += n * power;
        }
    }

    std::vector<Rational> r(static_cast<std::size_t>(m + 1), Rational(0));
    r[0] = 1;
    for (long q = 1; q <= m; ++q) {
        Rational acc(0);
        for (long i = 1; i <= q; ++i) {
            Rational term = t[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(q - i)];
            if (i % 2 == 0)
                acc -= term;
            else
                acc += term;
        }
        r[static_cast<std::size_t>(q)] = acc / q;
    }

    for (long q = 0; q <= m; ++q) pmf[static_cast<std::size_t>(q + shift)] = r[static_cast<std::size_t>(q)] * scale;
    return pmf;
}

// total! / (q! p! s!) * a^q b^p c^s, exact.
inline Rational multinomial_pmf(const std::array<Rational, 3>& probs, long total, const std::array<long, 3>& counts) {
    const auto& [a, b, c] = probs;
    const auto [q, p, s] = counts;
    if (q < 0 || p < 0 || s < 0) throw RangeError("multinomial counts must be nonnegative");
    if (q + p + s != total) throw CountError("multinomial counts do not sum to total");
    if (a + b + c != 1) throw RangeError("multinomial probabilities do not sum to 1");

    Integer coeff, second;
    mpz_bin_uiui(coeff.get_mpz_t(), static_cast<unsigned long>(total), static_cast<unsigned long>(q));
    mpz_bin_uiui(second.get_mpz_t(), static_cast<unsigned long>(total - q), static_cast<unsigned long>(p));
    coeff *= second;
    return Rational(coeff) * pow_int(a, q) * pow_int(b, p) * pow_int(c, s);
}

namespace detail {

// Regularized incomplete beta I_x(a,b), continued fraction form
// (Numerical Recipes). Good to ~1e-14 relative for the integer a,b used here.
inline double betacf(double a, double b, double x) {
    constexpr int max_iter = 500;
    constexpr double eps = 3.0e-16;
    constexpr double fpmin = 1.0e-300;

    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

inline double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                         b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

// Absolute slack assumed on reg_inc_beta evaluations; bisection steps only
// commit a bracket side when the comparison is certain beyond this slack,
// which keeps the returned endpoint on the conservative side of the root.
constexpr double kBetaGuard = 4.0e-13;

}  // namespace detail

// One-sided Clopper-Pearson lower bound: the p with
// Pr(Bin(n,p) >= successes) = alpha, i.e. I_p(k, n-k+1) = alpha.
// Bisection to interval width 1e-12; the returned (dyadic) rational never
// exceeds the true root.
inline Rational clopper_pearson_lower(std::uint64_t successes, std::uint64_t n, const Rational& alpha) {
    if (n == 0) throw RangeError("clopper_pearson: n must be positive");
    if (successes > n) throw RangeError("clopper_pearson: successes > n");
    if (alpha <= 0 || alpha >= 1) throw RangeError("clopper_pearson: alpha outside (0,1)");
    if (successes == 0) return Rational(0);

    const double target = to_double(alpha);
    const double a = static_cast<double>(successes);
    const double b = static_cast<double>(n - successes) + 1.0;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        double v = detail::reg_inc_beta(a, b, mid);  // increasing in mid
        if (v < target - detail::kBetaGuard)
            lo = mid;  // certainly below the root
        else
            hi = mid;
    }
    Rational out;
    mpq_set_d(out.get_mpq_t(), lo);
    return out;
}

// Symmetric upper bound: the p with Pr(Bin(n,p) <= successes) = alpha,
// i.e. I_p(k+1, n-k) = 1 - alpha; rounded up.
inline Rational clopper_pearson_upper(std::uint64_t successes, std::uint64_t n, const Rational& alpha) {
    if (n == 0) throw RangeError("clopper_pearson: n must be positive");
    if (successes > n) throw RangeError("clopper_pearson: successes > n");
    if (alpha <= 0 || alpha >= 1) throw RangeError("clopper_pearson: alpha outside (0,1)");
    if (successes == n) return Rational(1);

    const double target = to_double(Rational(1 - alpha));
    const double a = static_cast<double>(successes) + 1.0;
    const double b = static_cast<double>(n - successes);
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        double v = detail::reg_inc_beta(a, b, mid);
        if (v > target + detail::kBetaGuard)
            hi = mid;  // certainly above the root
        else
            lo = mid;
    }
    Rational out;
    mpq_set_d(out.get_mpq_t(), hi);
    return out;
}

}  // namespace sparsecert::exactmath
