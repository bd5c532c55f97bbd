#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "sparsecert/errors.hpp"
#include "sparsecert/types.hpp"

// Brute-force ground truth for small instances. Everything here works from
// per-dimension probability products and exhaustive enumeration only; it
// shares no construction code with the regions or certify modules, so a bug
// cannot hide in both.
namespace sparsecert::oracle {

using Classifier = std::function<int(const DiscreteVector&)>;

namespace detail {

inline void check_size(std::size_t dims, int k, std::size_t guard) {
    double total = 1.0;
    for (std::size_t i = 0; i < dims; ++i) {
        total *= k;
        if (total > static_cast<double>(guard)) throw SizeError("oracle instance too large: K^d exceeds guard");
    }
}

inline bool next_point(std::vector<std::int32_t>& z, int k) {
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (++z[i] < k) return true;
        z[i] = 0;
    }
    return false;
}

// (prob_x, prob_xt) of a single outcome, ordered by likelihood ratio
// descending via cross-multiplication (no division, exact).
struct PointMass {
    Rational px;
    Rational pxt;
};

inline bool ratio_greater(const PointMass& a, const PointMass& b) {
    return a.px * b.pxt > b.px * a.pxt;
}
inline bool ratio_equal(const PointMass& a, const PointMass& b) {
    return a.px * b.pxt == b.px * a.pxt;
}

}  // namespace detail

// Pr(phi(x) = z), exact per-dimension product.
inline Rational point_prob(const DiscreteVector& x, const DiscreteVector& z, const NoiseSpec& noise) {
    if (x.dims() != z.dims()) throw RangeError("point_prob: dimension mismatch");
    Rational p(1);
    for (std::size_t i = 0; i < x.dims(); ++i) {
        const bool zero = x.values[i] == 0;
        if (z.values[i] == x.values[i])
            p *= zero ? noise.a0() : noise.a1();
        else
            p *= zero ? noise.b0() : noise.b1();
        if (p == 0) return p;
    }
    return p;
}

inline std::vector<detail::PointMass> point_masses(const DiscreteVector& x, const DiscreteVector& xt,
                                                   const NoiseSpec& noise, std::size_t guard) {
    if (x.dims() != xt.dims()) throw RangeError("oracle: dimension mismatch");
    const int k = noise.num_categories();
    x.check_for(k);
    xt.check_for(k);
    detail::check_size(x.dims(), k, guard);

    std::vector<detail::PointMass> masses;
    std::vector<std::int32_t> z(x.dims(), 0);
    do {
        DiscreteVector zv{z};
        detail::PointMass m{point_prob(x, zv, noise), point_prob(xt, zv, noise)};
        if (m.px == 0 && m.pxt == 0) continue;
        masses.push_back(std::move(m));
    } while (detail::next_point(z, k));
    return masses;
}

// Groups every outcome by its exact likelihood ratio and returns the merged
// table, sorted descending.
inline RegionTable enumerate_regions(const DiscreteVector& x, const DiscreteVector& xt, const NoiseSpec& noise,
                                     std::size_t guard = 1000000) {
    auto masses = point_masses(x, xt, noise, guard);
    std::sort(masses.begin(), masses.end(), detail::ratio_greater);

    RegionTable table;
    for (const auto& m : masses) {
        if (!table.entries.empty()) {
            Region& last = table.entries.back();
            if (detail::ratio_equal({last.prob_x, last.prob_xt}, m)) {
                last.prob_x += m.px;
                last.prob_xt += m.pxt;
                // re-derive the merged ratio so the stored value stays exact
                last.ratio = last.prob_xt == 0 ? RatioValue::infinite()
                                               : RatioValue::finite(last.prob_x / last.prob_xt);
                continue;
            }
        }
        table.entries.push_back({m.pxt == 0 ? RatioValue::infinite() : RatioValue::finite(m.px / m.pxt), m.px, m.pxt});
    }
    table.validate();
    return table;
}

// Exact optimum of the worst-case-classifier problem with every outcome as
// its own region (the finest partition): greedy in ratio-descending order.
inline Rational lp_exact(const DiscreteVector& x, const DiscreteVector& xt, const NoiseSpec& noise,
                         const Rational& p_lower, std::size_t guard = 1000000) {
    if (p_lower < 0 || p_lower > 1) throw RangeError("lp_exact: p_lower outside [0,1]");
    auto masses = point_masses(x, xt, noise, guard);
    std::sort(masses.begin(), masses.end(), detail::ratio_greater);

    Rational consumed(0), value(0);
    for (const auto& m : masses) {
        if (m.px == 0) continue;
        if (consumed + m.px <= p_lower) {
            consumed += m.px;
            value += m.pxt;
        } else {
            value += (p_lower - consumed) * m.pxt / m.px;
            consumed = p_lower;
            break;
        }
    }
    if (consumed < p_lower) throw BudgetError("lp_exact: budget exceeds total probability");
    return value;
}

// Finest-partition version of the multi-class margin LP: assign the top-class
// budget in ratio-descending order, the runner-up budget in ratio-ascending
// order (outcomes unreachable from x are free for the runner-up).
inline Rational lp_exact_margin(const DiscreteVector& x, const DiscreteVector& xt, const NoiseSpec& noise,
                                const Rational& p_star, const Rational& p_runner, std::size_t guard = 1000000) {
    if (p_star + p_runner > 1) throw ValidityError("lp_exact_margin: bounds exceed 1");
    auto masses = point_masses(x, xt, noise, guard);
    std::sort(masses.begin(), masses.end(), detail::ratio_greater);

    Rational consumed(0), gain(0);
    for (const auto& m : masses) {
        if (m.px == 0) continue;
        if (consumed + m.px <= p_star) {
            consumed += m.px;
            gain += m.pxt;
        } else {
            gain += (p_star - consumed) * m.pxt / m.px;
            consumed = p_star;
            break;
        }
    }
    if (consumed < p_star) throw BudgetError("lp_exact_margin: budget exceeds total probability");

    Rational consumed_t(0), loss(0);
    for (auto it = masses.rbegin(); it != masses.rend(); ++it) {
        if (it->px == 0) {
            loss += it->pxt;
            continue;
        }
        if (consumed_t + it->px <= p_runner) {
            consumed_t += it->px;
            loss += it->pxt;
        } else {
            loss += (p_runner - consumed_t) * it->pxt / it->px;
            consumed_t = p_runner;
            break;
        }
    }
    return gain - loss;
}

// Exact smoothed class probabilities Pr(f(phi(x)) = y) by full enumeration.
inline std::vector<Rational> exact_class_probs(const Classifier& classifier, const DiscreteVector& x,
                                               const NoiseSpec& noise, int num_classes,
                                               std::size_t guard = 1000000) {
    const int k = noise.num_categories();
    x.check_for(k);
    detail::check_size(x.dims(), k, guard);
    std::vector<Rational> probs(static_cast<std::size_t>(num_classes), Rational(0));
    std::vector<std::int32_t> z(x.dims(), 0);
    do {
        DiscreteVector zv{z};
        int y = classifier(zv);
        if (y < 0 || y >= num_classes) throw RangeError("classifier returned class outside [0, num_classes)");
        probs[static_cast<std::size_t>(y)] += point_prob(x, zv, noise);
    } while (detail::next_point(z, k));
    return probs;
}

inline int top_class(const std::vector<Rational>& probs) {
    int best = 0;
    for (int y = 1; y < static_cast<int>(probs.size()); ++y)
        if (probs[static_cast<std::size_t>(y)] > probs[static_cast<std::size_t>(best)]) best = y;
    return best;
}

inline bool ball_member(const DiscreteVector& x, const DiscreteVector& z, const RadiiSpec& radii) {
    if (x.dims() != z.dims()) return false;
    long adds = 0, dels = 0, changes = 0;
    for (std::size_t i = 0; i < x.dims(); ++i) {
        if (x.values[i] == z.values[i]) continue;
        if (x.values[i] == 0)
            ++adds;
        else if (z.values[i] == 0)
            ++dels;
        else
            ++changes;
    }
    return adds <= radii.r_add && dels <= radii.r_del && changes <= radii.r_change;
}

inline bool sphere_member(const DiscreteVector& x, const DiscreteVector& z, const RadiiSpec& radii) {
    if (x.dims() != z.dims()) return false;
    long adds = 0, dels = 0, changes = 0;
    for (std::size_t i = 0; i < x.dims(); ++i) {
        if (x.values[i] == z.values[i]) continue;
        if (x.values[i] == 0)
            ++adds;
        else if (z.values[i] == 0)
            ++dels;
        else
            ++changes;
    }
    return adds == radii.r_add && dels == radii.r_del && changes == radii.r_change;
}

// Enumerates every point of the ball around x and verifies, with exact
// probabilities, that the smoothed prediction stays strictly on g(x)'s class.
// A certified verdict computed from exact probabilities must never contradict
// a `false` from here.
inline bool exhaustive_ball_check(const Classifier& classifier, const DiscreteVector& x, const NoiseSpec& noise,
                                  const RadiiSpec& radii, int num_classes, std::size_t guard = 1000000) {
    radii.check_for(noise.num_categories());
    auto base = exact_class_probs(classifier, x, noise, num_classes, guard);
    const int y0 = top_class(base);

    std::vector<std::int32_t> z(x.dims(), 0);
    do {
        DiscreteVector cand{z};
        if (!ball_member(x, cand, radii)) continue;
        auto probs = exact_class_probs(classifier, cand, noise, num_classes, guard);
        for (int y = 0; y < num_classes; ++y) {
            if (y == y0) continue;
            if (!(probs[static_cast<std::size_t>(y0)] > probs[static_cast<std::size_t>(y)])) return false;
        }
    } while (detail::next_point(z, noise.num_categories()));
    return true;
}

}  // namespace sparsecert::oracle
