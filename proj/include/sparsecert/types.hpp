#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparsecert/errors.hpp"
#include "sparsecert/rational.hpp"

namespace sparsecert {

enum class Mode { binary_class, multi_class };

inline const char* mode_name(Mode m) { return m == Mode::binary_class ? "binary" : "multi"; }

// Randomization scheme parameters: zeros flip with p_plus, non-zeros flip
// with p_minus (uniformly over the K-1 other values when K > 2). Immutable
// after construction; every invariant is checked here.
class NoiseSpec {
  public:
    NoiseSpec(Rational p_plus, Rational p_minus, int num_categories)
        : p_plus_(std::move(p_plus)), p_minus_(std::move(p_minus)), k_(num_categories) {
        if (k_ < 2) throw CategoryError("num_categories must be >= 2, got " + std::to_string(k_));
        if (p_plus_ < 0 || p_plus_ > 1) throw RangeError("p_plus outside [0,1]");
        if (p_minus_ < 0 || p_minus_ > 1) throw RangeError("p_minus outside [0,1]");
    }

    const Rational& p_plus() const { return p_plus_; }
    const Rational& p_minus() const { return p_minus_; }
    int num_categories() const { return k_; }
    bool is_binary() const { return k_ == 2; }

    // Per-dimension outcome probabilities: a = keep, b = land on one given
    // other value, c = land on any of the remaining K-2 values. Group 0 is
    // for zero entries, group 1 for non-zero entries.
    Rational a0() const { return 1 - p_plus_; }
    Rational b0() const { return p_plus_ / (k_ - 1); }
    Rational c0() const { return 1 - a0() - b0(); }
    Rational a1() const { return 1 - p_minus_; }
    Rational b1() const { return p_minus_ / (k_ - 1); }
    Rational c1() const { return 1 - a1() - b1(); }

    bool operator==(const NoiseSpec& o) const {
        return p_plus_ == o.p_plus_ && p_minus_ == o.p_minus_ && k_ == o.k_;
    }

  private:
    Rational p_plus_;
    Rational p_minus_;
    int k_;
};

// Parses exact decimal probabilities and builds a validated NoiseSpec.
inline NoiseSpec validate_noise_spec(const std::string& p_plus, const std::string& p_minus, int num_categories) {
    return NoiseSpec(rational_from_decimal(p_plus), rational_from_decimal(p_minus), num_categories);
}

// Perturbation radii: additions (zero -> non-zero), deletions (non-zero ->
// zero) and, for K > 2 only, changes (non-zero -> different non-zero).
struct RadiiSpec {
    long r_add = 0;
    long r_del = 0;
    long r_change = 0;

    RadiiSpec() = default;
    RadiiSpec(long add, long del, long change = 0) : r_add(add), r_del(del), r_change(change) {
        if (r_add < 0 || r_del < 0 || r_change < 0) throw RangeError("radii must be nonnegative");
    }

    long total() const { return r_add + r_del + r_change; }
    bool zero() const { return total() == 0; }

    void check_for(int num_categories) const {
        if (num_categories == 2 && r_change != 0)
            throw CategoryError("r_change must be 0 for binary data (K=2)");
    }

    bool operator==(const RadiiSpec& o) const {
        return r_add == o.r_add && r_del == o.r_del && r_change == o.r_change;
    }
};

// Likelihood ratio of a region; +infinity when the region is unreachable
// from the adversarial point (prob_xt = 0 with prob_x > 0).
class RatioValue {
  public:
    static RatioValue infinite() { return RatioValue(true, Rational(0)); }
    static RatioValue finite(Rational v) { return RatioValue(false, std::move(v)); }

    bool is_infinite() const { return infinite_; }
    const Rational& value() const {
        if (infinite_) throw InternalError("value() on infinite ratio");
        return value_;
    }

    bool operator==(const RatioValue& o) const {
        if (infinite_ != o.infinite_) return false;
        return infinite_ || value_ == o.value_;
    }
    // descending-friendly ordering: infinity sorts above every finite ratio
    bool operator<(const RatioValue& o) const {
        if (infinite_) return false;
        if (o.infinite_) return true;
        return value_ < o.value_;
    }
    bool operator>(const RatioValue& o) const { return o < *this; }

  private:
    RatioValue(bool inf, Rational v) : infinite_(inf), value_(std::move(v)) {}
    bool infinite_;
    Rational value_;
};

struct Region {
    RatioValue ratio;
    Rational prob_x;   // Pr(phi(x) in R)
    Rational prob_xt;  // Pr(phi(x~) in R)
};

// Ordered partition of the outcome space into constant-likelihood-ratio
// regions, sorted by ratio descending with strictly distinct ratios.
struct RegionTable {
    std::vector<Region> entries;

    std::size_t size() const { return entries.size(); }

    void validate() const {
        Rational sum_x(0), sum_xt(0);
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const Region& r = entries[i];
            if (r.prob_x < 0 || r.prob_xt < 0) throw InternalError("region with negative probability");
            if (r.prob_x == 0 && r.prob_xt == 0) throw InternalError("empty region retained");
            sum_x += r.prob_x;
            sum_xt += r.prob_xt;
            if (r.ratio.is_infinite()) {
                if (r.prob_xt != 0) throw InternalError("infinite ratio with prob_xt > 0");
            } else if (r.prob_x != r.ratio.value() * r.prob_xt) {
                throw InternalError("region ratio inconsistent with probabilities");
            }
            if (i > 0 && !(entries[i - 1].ratio > r.ratio))
                throw InternalError("region table not strictly ratio-descending");
        }
        if (sum_x != 1) throw InternalError("region probabilities under x do not sum to 1");
        if (sum_xt != 1) throw InternalError("region probabilities under x~ do not sum to 1");
    }
};

// Vector over {0,...,K-1}^d. K itself lives in NoiseSpec.
struct DiscreteVector {
    std::vector<std::int32_t> values;

    DiscreteVector() = default;
    explicit DiscreteVector(std::vector<std::int32_t> v) : values(std::move(v)) {}

    std::size_t dims() const { return values.size(); }

    void check_for(int num_categories) const {
        for (std::int32_t v : values)
            if (v < 0 || v >= num_categories)
                throw RangeError("vector entry outside {0,...,K-1}");
    }
};

// Monte-Carlo class counts for one input.
struct VoteRecord {
    std::string input_id;
    std::vector<std::uint64_t> counts;

    std::uint64_t num_samples() const {
        std::uint64_t n = 0;
        for (std::uint64_t c : counts) n += c;
        return n;
    }
};

// Confidence-bounded class probabilities feeding the certificate.
struct ClassBounds {
    int top_class = 0;
    Rational p_lower;         // lower bound on p_{y*}
    Rational p_upper_runner;  // upper bound on the runner-up (1 - p_lower in binary mode)
    Rational alpha;
    Mode mode = Mode::binary_class;
};

struct CertResult {
    std::string input_id;
    RadiiSpec radii;
    std::optional<long> l0_radius;  // set when the result covers an l0 ball
    bool certified = false;
    Rational rho_or_margin;  // rho in binary mode, margin in multi mode
    bool abstained = false;
    Mode mode = Mode::binary_class;
    // multi-class run decided by the binary-class route (Bonferroni bounds kept)
    bool binary_fallback = false;
};

// Canonical pair (x, x~) realizing the given radii exactly: deletions first,
// then additions, then (K > 2) value changes. Only the oracle needs concrete
// vectors; the certificate itself is data-independent.
inline std::pair<DiscreteVector, DiscreteVector> sphere_representatives(const RadiiSpec& radii, int num_categories) {
    if (num_categories < 2) throw CategoryError("num_categories must be >= 2");
    radii.check_for(num_categories);
    std::vector<std::int32_t> x, xt;
    for (long i = 0; i < radii.r_del; ++i) {
        x.push_back(1);
        xt.push_back(0);
    }
    for (long i = 0; i < radii.r_add; ++i) {
        x.push_back(0);
        xt.push_back(1);
    }
    for (long i = 0; i < radii.r_change; ++i) {
        x.push_back(1);
        xt.push_back(2);
    }
    return {DiscreteVector(std::move(x)), DiscreteVector(std::move(xt))};
}

}  // namespace sparsecert
