#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparsecert/confidence.hpp"
#include "sparsecert/errors.hpp"
#include "sparsecert/parallel.hpp"
#include "sparsecert/regions.hpp"
#include "sparsecert/types.hpp"

namespace sparsecert::certify {

// Greedy solution of the binary-class worst-case LP: consume regions in
// ratio-descending order until the budget p_lower of x-mass is spent, the
// last region partially. Returns the minimal probability mass the worst-case
// classifier keeps on the certified class under x~.
inline Rational rho(const RegionTable& table, const Rational& p_lower) {
    if (p_lower < 0 || p_lower > 1) throw RangeError("rho: p_lower outside [0,1]");
    Rational consumed(0), value(0);
    for (const Region& r : table.entries) {
        if (r.prob_x == 0) continue;
        if (consumed + r.prob_x <= p_lower) {
            consumed += r.prob_x;
            value += r.prob_xt;
        } else {
            value += (p_lower - consumed) * r.prob_xt / r.prob_x;
            consumed = p_lower;
            break;
        }
    }
    if (consumed < p_lower) throw BudgetError("rho: p_lower exceeds total region mass");
    return value;
}

// Multi-class worst-case margin: the top-class budget is assigned in
// ratio-descending order, the runner-up budget in ratio-ascending order.
// Regions with no x-mass cost the runner-up nothing and are taken first.
inline Rational margin(const RegionTable& table, const Rational& p_lower_star, const Rational& p_upper_runner) {
    if (p_lower_star < 0 || p_lower_star > 1) throw RangeError("margin: p_lower_star outside [0,1]");
    if (p_upper_runner < 0 || p_upper_runner > 1) throw RangeError("margin: p_upper_runner outside [0,1]");
    if (p_lower_star + p_upper_runner > 1)
        throw ValidityError("margin: p_lower_star + p_upper_runner exceeds 1");

    Rational gain = rho(table, p_lower_star);

    Rational consumed(0), loss(0);
    for (auto it = table.entries.rbegin(); it != table.entries.rend(); ++it) {
        if (it->prob_x == 0) {
            loss += it->prob_xt;
            continue;
        }
        if (consumed + it->prob_x <= p_upper_runner) {
            consumed += it->prob_x;
            loss += it->prob_xt;
        } else {
            loss += (p_upper_runner - consumed) * it->prob_xt / it->prob_x;
            consumed = p_upper_runner;
            break;
        }
    }
    if (consumed < p_upper_runner) throw BudgetError("margin: runner budget exceeds total region mass");
    return gain - loss;
}

// Region table for one noise/radii configuration. Dispatch:
//   zero radii        -> single trivial region (the sphere is {x})
//   K = 2, interior   -> binary construction
//   K = 2, one p = 0  -> three-region special construction
//   K = 2, both p = 0 -> disjoint supports (identity smoothing)
//   K > 2, interior   -> discrete construction
// Flip probabilities of 1 (and discrete boundary values) are rejected.
inline RegionTable build_table(const NoiseSpec& noise, const RadiiSpec& radii) {
    radii.check_for(noise.num_categories());
    if (radii.zero()) return regions::trivial_regions();
    const Rational& pp = noise.p_plus();
    const Rational& pm = noise.p_minus();
    if (noise.is_binary()) {
        if (pp > 0 && pp < 1 && pm > 0 && pm < 1) return regions::binary_regions(noise, radii);
        if ((pp == 0) != (pm == 0) && pp < 1 && pm < 1) return regions::special_regions(noise, radii);
        if (pp == 0 && pm == 0) return regions::no_noise_regions();
        throw BoundaryError("certify: flip probability 1 is not certifiable");
    }
    return regions::discrete_regions(noise, radii);
}

namespace detail {

struct Decision {
    bool certified = false;
    Rational value;
    bool binary_fallback = false;
};

inline Rational half() { return Rational(1, 2); }

inline Decision decide(const RegionTable& table, const ClassBounds& bounds) {
    Decision d;
    if (bounds.mode == Mode::binary_class) {
        d.value = rho(table, bounds.p_lower);
        d.certified = d.value > half();
        return d;
    }
    // A valid margin dominates the binary condition: the runner budget is at
    // most 1 - p*, so margin(p*, runner) >= margin(p*, 1 - p*) = 2*rho - 1.
    // The binary route only matters when Bonferroni pushes p* + runner
    // past 1 and the margin problem is infeasible.
    if (bounds.p_lower + bounds.p_upper_runner <= 1) {
        d.value = margin(table, bounds.p_lower, bounds.p_upper_runner);
        d.certified = d.value > 0;
        return d;
    }
    d.value = rho(table, bounds.p_lower);
    d.certified = d.value > half();
    d.binary_fallback = true;
    return d;
}

inline bool abstains(const ClassBounds& bounds) {
    if (bounds.p_lower > half()) return false;
    if (bounds.mode == Mode::multi_class && bounds.p_lower + bounds.p_upper_runner <= 1 &&
        bounds.p_lower > bounds.p_upper_runner)
        return false;
    return true;
}

}  // namespace detail

inline CertResult certify_point(const NoiseSpec& noise, const RadiiSpec& radii, const ClassBounds& bounds,
                                std::string input_id = {}) {
    RegionTable table = build_table(noise, radii);
    detail::Decision d = detail::decide(table, bounds);
    CertResult result;
    result.input_id = std::move(input_id);
    result.radii = radii;
    result.certified = d.certified;
    result.rho_or_margin = d.value;
    result.mode = bounds.mode;
    result.binary_fallback = d.binary_fallback;
    result.abstained = detail::abstains(bounds);
    return result;
}

// Two independently smoothed groups (e.g. graph structure and attributes)
// with separate noise and radii; the certificate runs on the product table.
struct JointSpec {
    NoiseSpec noise_a;
    RadiiSpec radii_a;
    NoiseSpec noise_b;
    RadiiSpec radii_b;
};

inline CertResult certify_point_joint(const JointSpec& spec, const ClassBounds& bounds, std::string input_id = {}) {
    RegionTable table =
        regions::joint_regions(build_table(spec.noise_a, spec.radii_a), build_table(spec.noise_b, spec.radii_b));
    detail::Decision d = detail::decide(table, bounds);
    CertResult result;
    result.input_id = std::move(input_id);
    result.radii = spec.radii_a;
    result.certified = d.certified;
    result.rho_or_margin = d.value;
    result.mode = bounds.mode;
    result.binary_fallback = d.binary_fallback;
    result.abstained = detail::abstains(bounds);
    return result;
}

struct FrontierPoint {
    long r_add = 0;
    long r_del = 0;
};

// Pareto frontier of certifiable (r_add, r_del) pairs: for each r_del from 0
// upward while (0, r_del) certifies, the largest certifiable r_add. Uses the
// monotonicity of the certificate in both radii; dominated pairs are pruned.
// For K > 2 the change radius is held fixed at `r_change`.
inline std::vector<FrontierPoint> max_radius_frontier(const NoiseSpec& noise, const ClassBounds& bounds,
                                                      long cap = 200, long r_change = 0) {
    auto certifiable = [&](long ra, long rd) {
        return certify_point(noise, RadiiSpec(ra, rd, r_change), bounds).certified;
    };

    std::vector<FrontierPoint> frontier;
    if (!certifiable(0, 0)) return frontier;

    long prev_max = cap;
    for (long rd = 0; rd <= cap; ++rd) {
        if (!certifiable(0, rd)) break;
        // largest certifiable r_add in [0, prev_max], monotone in r_add
        long lo = 0, hi = prev_max;
        while (lo < hi) {
            long mid = lo + (hi - lo + 1) / 2;
            if (certifiable(mid, rd))
                lo = mid;
            else
                hi = mid - 1;
        }
        frontier.push_back({lo, rd});
        prev_max = lo;
    }
    // keep only Pareto-maximal pairs: r_add strictly decreasing as r_del grows
    std::vector<FrontierPoint> pruned;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
        if (i + 1 < frontier.size() && frontier[i + 1].r_add >= frontier[i].r_add) continue;
        pruned.push_back(frontier[i]);
    }
    return pruned;
}

// l0-ball certificate of radius r: certified iff every split of r into
// radii certifies. Reports the worst (minimal) rho/margin across splits.
inline CertResult certify_l0(const NoiseSpec& noise, const ClassBounds& bounds, long r, std::string input_id = {}) {
    if (r < 0) throw RangeError("certify_l0: radius must be nonnegative");
    std::vector<RadiiSpec> splits;
    if (noise.is_binary()) {
        for (long ra = 0; ra <= r; ++ra) splits.emplace_back(ra, r - ra, 0);
    } else {
        for (long ra = 0; ra <= r; ++ra)
            for (long rd = 0; ra + rd <= r; ++rd) splits.emplace_back(ra, rd, r - ra - rd);
    }

    CertResult result;
    result.input_id = std::move(input_id);
    result.radii = RadiiSpec(r, r, noise.is_binary() ? 0 : r);
    result.l0_radius = r;
    result.mode = bounds.mode;
    result.certified = true;
    bool first = true;
    for (const RadiiSpec& radii : splits) {
        CertResult part = certify_point(noise, radii, bounds);
        result.certified = result.certified && part.certified;
        result.binary_fallback = result.binary_fallback || part.binary_fallback;
        result.abstained = part.abstained;
        if (first || part.rho_or_margin < result.rho_or_margin) result.rho_or_margin = part.rho_or_margin;
        first = false;
    }
    return result;
}

struct BatchStats {
    std::size_t unique_profiles = 0;
};

// Certifies a batch of vote records at fixed radii. The decision depends on
// the counts only through their sorted multiset, so identical profiles are
// computed once; output order matches input order and is independent of the
// number of worker threads.
inline std::vector<CertResult> memoized_certify(const std::vector<VoteRecord>& votes, const NoiseSpec& noise,
                                                const RadiiSpec& radii, const Rational& alpha, Mode mode,
                                                int jobs = 1, BatchStats* stats = nullptr) {
    using Key = std::vector<std::uint64_t>;
    std::vector<Key> keys;
    keys.reserve(votes.size());
    std::map<Key, const VoteRecord*> first_seen;
    for (const VoteRecord& record : votes) {
        Key key = record.counts;
        std::sort(key.begin(), key.end(), std::greater<>());
        first_seen.emplace(key, &record);
        keys.push_back(std::move(key));
    }
    std::vector<std::pair<const Key*, const VoteRecord*>> unique_work;
    unique_work.reserve(first_seen.size());
    for (auto& [key, rec] : first_seen) unique_work.emplace_back(&key, rec);
    if (stats) stats->unique_profiles = unique_work.size();

    struct Computed {
        detail::Decision decision;
        bool abstained = false;
    };
    RegionTable table = build_table(noise, radii);
    std::vector<Computed> computed(unique_work.size());
    parallel_for(unique_work.size(), jobs, [&](std::size_t i) {
        const VoteRecord& record = *unique_work[i].second;
        ClassBounds bounds = mode == Mode::binary_class
                                 ? confidence::binary_bounds(record, alpha)
                                 : confidence::multiclass_bounds(record, alpha, static_cast<int>(record.counts.size()));
        computed[i].decision = detail::decide(table, bounds);
        computed[i].abstained = detail::abstains(bounds);
    });
    std::map<Key, const Computed*> memo;
    for (std::size_t i = 0; i < unique_work.size(); ++i) memo.emplace(*unique_work[i].first, &computed[i]);

    std::vector<CertResult> results;
    results.reserve(votes.size());
    for (std::size_t i = 0; i < votes.size(); ++i) {
        const Computed& c = *memo.at(keys[i]);
        CertResult r;
        r.input_id = votes[i].input_id;
        r.radii = radii;
        r.certified = c.decision.certified;
        r.rho_or_margin = c.decision.value;
        r.mode = mode;
        r.binary_fallback = c.decision.binary_fallback;
        r.abstained = c.abstained;
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace sparsecert::certify
