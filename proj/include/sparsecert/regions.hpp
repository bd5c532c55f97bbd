#pragma once

#include <algorithm>
#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "sparsecert/errors.hpp"
#include "sparsecert/exactmath.hpp"
#include "sparsecert/types.hpp"

namespace sparsecert::regions {

namespace detail {

// Drops empty regions, merges equal exact ratios, sorts descending and
// validates the table invariants. Regions with prob_x = 0 but prob_xt > 0
// are kept (ratio 0): the multi-class greedy needs them.
inline RegionTable finalize(std::vector<Region> raw) {
    std::map<Rational, std::pair<Rational, Rational>> finite;  // ratio -> (sum_x, sum_xt)
    Rational inf_x(0), inf_xt(0);
    bool have_inf = false;
    for (Region& r : raw) {
        if (r.prob_x == 0 && r.prob_xt == 0) continue;
        if (r.ratio.is_infinite()) {
            have_inf = true;
            inf_x += r.prob_x;
            inf_xt += r.prob_xt;
        } else {
            auto& acc = finite[r.ratio.value()];
            acc.first += r.prob_x;
            acc.second += r.prob_xt;
        }
    }
    RegionTable table;
    if (have_inf) table.entries.push_back({RatioValue::infinite(), inf_x, inf_xt});
    for (auto it = finite.rbegin(); it != finite.rend(); ++it)
        table.entries.push_back({RatioValue::finite(it->first), it->second.first, it->second.second});
    table.validate();
    return table;
}

inline Region make_region(Rational prob_x, Rational prob_xt) {
    if (prob_xt == 0) return {RatioValue::infinite(), std::move(prob_x), std::move(prob_xt)};
    return {RatioValue::finite(prob_x / prob_xt), std::move(prob_x), std::move(prob_xt)};
}

}  // namespace detail

// Single region covering everything: the zero-radius "sphere" where x~ = x.
inline RegionTable trivial_regions() {
    RegionTable t;
    t.entries.push_back({RatioValue::finite(Rational(1)), Rational(1), Rational(1)});
    return t;
}

// Degenerate table for p_plus = p_minus = 0 with nonzero radii: phi is the
// identity, so the supports {x} and {x~} never meet.
inline RegionTable no_noise_regions() {
    RegionTable t;
    t.entries.push_back({RatioValue::infinite(), Rational(1), Rational(0)});
    t.entries.push_back({RatioValue::finite(Rational(0)), Rational(0), Rational(1)});
    return t;
}

// Binary scheme, strictly interior flip probabilities. Exactly
// r_add + r_del + 1 regions indexed by the flip count q; region q has
//   prob_x  = PB(q; [p+, r_add], [p-, r_del])
//   ratio   = [p+/(1-p-)]^(q-r_del) * [p-/(1-p+)]^(q-r_add)
// The ratio is monotone in q (decreasing iff p+ + p- < 1), so sorting merges
// the constant case p+ + p- = 1 into a single region and otherwise keeps
// all q distinct.
inline RegionTable binary_regions(const NoiseSpec& noise, const RadiiSpec& radii) {
    if (!noise.is_binary()) throw CategoryError("binary_regions requires K = 2");
    radii.check_for(2);
    const Rational& pp = noise.p_plus();
    const Rational& pm = noise.p_minus();
    if (pp <= 0 || pp >= 1 || pm <= 0 || pm >= 1)
        throw BoundaryError("binary_regions requires p_plus, p_minus in (0,1)");

    std::vector<Rational> pmf = exactmath::pb_pmf({pp, radii.r_add, pm, radii.r_del});
    const Rational base_add = pp / (1 - pm);
    const Rational base_del = pm / (1 - pp);

    std::vector<Region> raw;
    for (long q = 0; q <= radii.r_add + radii.r_del; ++q) {
        Rational ratio = pow_int(base_add, q - radii.r_del) * pow_int(base_del, q - radii.r_add);
        Rational prob_x = pmf[static_cast<std::size_t>(q)];
        Rational prob_xt = prob_x / ratio;
        raw.push_back({RatioValue::finite(std::move(ratio)), std::move(prob_x), std::move(prob_xt)});
    }
    return detail::finalize(std::move(raw));
}

// Boundary scheme with exactly one flip probability at zero: three regions.
// For p+ = 0 (deletion-only noise):
//   R1: reachable from both sides,   prob_x = p-^r_del, prob_xt = p-^r_add
//   R2: reachable only from x,       prob_x = 1 - p-^r_del
//   R3: reachable only from x~,      prob_xt = 1 - p-^r_add
// Mirrored with p+ when p- = 0. Empty regions drop out at zero radii.
inline RegionTable special_regions(const NoiseSpec& noise, const RadiiSpec& radii) {
    if (!noise.is_binary()) throw CategoryError("special_regions requires K = 2");
    radii.check_for(2);
    const Rational& pp = noise.p_plus();
    const Rational& pm = noise.p_minus();
    const bool plus_zero = pp == 0;
    const bool minus_zero = pm == 0;
    if (plus_zero == minus_zero) throw BoundaryError("special_regions requires exactly one of p_plus, p_minus to be 0");
    const Rational& p = plus_zero ? pm : pp;
    if (p <= 0 || p >= 1) throw BoundaryError("special_regions requires the nonzero probability in (0,1)");

    // With p- = 0 the roles of the radii swap: x can only gain bits.
    const long e_x = plus_zero ? radii.r_del : radii.r_add;
    const long e_xt = plus_zero ? radii.r_add : radii.r_del;

    Rational both_x = pow_int(p, e_x);
    Rational both_xt = pow_int(p, e_xt);
    std::vector<Region> raw;
    raw.push_back(detail::make_region(both_x, both_xt));
    raw.push_back(detail::make_region(1 - both_x, Rational(0)));
    raw.push_back(detail::make_region(Rational(0), 1 - both_xt));
    return detail::finalize(std::move(raw));
}

// Merge key for the discrete construction: configurations sharing these four
// exponent differences always share the likelihood ratio.
struct TripletKey {
    long d_q0_p1 = 0;
    long d_p0_q1 = 0;
    long d_s0_s1 = 0;
    long d_q2_p2 = 0;

    auto tied() const { return std::tie(d_q0_p1, d_p0_q1, d_s0_s1, d_q2_p2); }
    bool operator==(const TripletKey& o) const { return tied() == o.tied(); }
    bool operator<(const TripletKey& o) const { return tied() < o.tied(); }
};

inline Rational triplet_ratio(const NoiseSpec& noise, const TripletKey& key) {
    return pow_int(noise.a0() / noise.b1(), key.d_q0_p1) * pow_int(noise.b0() / noise.a1(), key.d_p0_q1) *
           pow_int(noise.c0() / noise.c1(), key.d_s0_s1) * pow_int(noise.a1() / noise.b1(), key.d_q2_p2);
}

// General discrete scheme (K >= 3), interior probabilities. Enumerates all
// (q_j, p_j, s_j) triplets per radius group, pre-groups by TripletKey and
// merges by exact ratio. For p+ = p- the result collapses to 2r+1 regions;
// in general it is bounded by (r+1)^2.
inline RegionTable discrete_regions(const NoiseSpec& noise, const RadiiSpec& radii) {
    if (noise.num_categories() < 3) throw CategoryError("discrete_regions requires K >= 3");
    const Rational& pp = noise.p_plus();
    const Rational& pm = noise.p_minus();
    if (pp <= 0 || pp >= 1 || pm <= 0 || pm >= 1)
        throw BoundaryError("discrete_regions requires p_plus, p_minus in (0,1)");

    struct Triplet {
        long q, p, s;
    };
    auto enumerate = [](long r) {
        std::vector<Triplet> out;
        for (long q = 0; q <= r; ++q)
            for (long p = 0; p + q <= r; ++p) out.push_back({q, p, r - q - p});
        return out;
    };
    const auto t0 = enumerate(radii.r_add);
    const auto t1 = enumerate(radii.r_del);
    const auto t2 = enumerate(radii.r_change);

    const std::array<Rational, 3> zero_x{noise.a0(), noise.b0(), noise.c0()};
    const std::array<Rational, 3> nonzero_x{noise.a1(), noise.b1(), noise.c1()};
    // Under x~ the roles of "keep" and "hit the other point's value" swap.
    const std::array<Rational, 3> zero_xt{noise.b1(), noise.a1(), noise.c1()};
    const std::array<Rational, 3> nonzero_add_xt{noise.b0(), noise.a0(), noise.c0()};

    std::map<TripletKey, std::pair<Rational, Rational>> grouped;
    for (const Triplet& u0 : t0) {
        Rational px0 = exactmath::multinomial_pmf(zero_x, radii.r_add, {u0.q, u0.p, u0.s});
        Rational pxt0 = exactmath::multinomial_pmf(zero_xt, radii.r_add, {u0.q, u0.p, u0.s});
        for (const Triplet& u1 : t1) {
            Rational px1 = px0 * exactmath::multinomial_pmf(nonzero_x, radii.r_del, {u1.q, u1.p, u1.s});
            Rational pxt1 = pxt0 * exactmath::multinomial_pmf(nonzero_add_xt, radii.r_del, {u1.q, u1.p, u1.s});
            for (const Triplet& u2 : t2) {
                Rational px = px1 * exactmath::multinomial_pmf(nonzero_x, radii.r_change, {u2.q, u2.p, u2.s});
                Rational pxt = pxt1 * exactmath::multinomial_pmf(zero_xt, radii.r_change, {u2.q, u2.p, u2.s});
                TripletKey key{u0.q - u1.p, u0.p - u1.q, u0.s - u1.s, u2.q - u2.p};
                auto& acc = grouped[key];
                acc.first += px;
                acc.second += pxt;
            }
        }
    }

    std::vector<Region> raw;
    for (auto& [key, probs] : grouped) {
        Rational ratio = triplet_ratio(noise, key);
        if (probs.first != ratio * probs.second)
            throw InternalError("discrete region ratio does not match probabilities");
        raw.push_back({RatioValue::finite(std::move(ratio)), std::move(probs.first), std::move(probs.second)});
    }
    return detail::finalize(std::move(raw));
}

// Product construction for two independently randomized groups: probabilities
// multiply and so do the ratios; equal-ratio products merge.
inline RegionTable joint_regions(const RegionTable& table_a, const RegionTable& table_b) {
    std::vector<Region> raw;
    raw.reserve(table_a.size() * table_b.size());
    for (const Region& ra : table_a.entries)
        for (const Region& rb : table_b.entries) {
            Rational px = ra.prob_x * rb.prob_x;
            Rational pxt = ra.prob_xt * rb.prob_xt;
            if (px == 0 && pxt == 0) continue;
            raw.push_back(detail::make_region(std::move(px), std::move(pxt)));
        }
    return detail::finalize(std::move(raw));
}

}  // namespace sparsecert::regions
