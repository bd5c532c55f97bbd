#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparsecert/classifiers.hpp"
#include "sparsecert/confidence.hpp"
#include "sparsecert/errors.hpp"
#include "sparsecert/parallel.hpp"
#include "sparsecert/rng.hpp"
#include "sparsecert/types.hpp"

namespace sparsecert::smoothing {

// Index range [begin, end) smoothed with its own noise (joint mode).
struct SamplerGroup {
    std::size_t begin = 0;
    std::size_t end = 0;
    NoiseSpec noise;
};

struct SamplerConfig {
    NoiseSpec noise;
    std::uint64_t seed = 0;
    std::uint64_t num_selection = 1000;     // samples used to pick y*
    std::uint64_t num_estimation = 1000000; // samples used to bound p_{y*}
    std::optional<std::pair<SamplerGroup, SamplerGroup>> grouping;
    int jobs = 1;

    void check(std::size_t dims) const {
        if (num_selection == 0 || num_estimation == 0) throw RangeError("sample counts must be positive");
        if (!grouping) return;
        const auto& [a, b] = *grouping;
        const bool ordered = a.end == b.begin && a.begin == 0 && b.end == dims;
        const bool swapped = b.end == a.begin && b.begin == 0 && a.end == dims;
        if (!ordered && !swapped) throw RangeError("grouping index sets must be disjoint and cover all dimensions");
        if (a.noise.num_categories() != noise.num_categories() || b.noise.num_categories() != noise.num_categories())
            throw CategoryError("grouped noise specs must share the category count");
    }
};

namespace detail {

// Per-dimension flip thresholds resolved once per (x, grouping).
struct DimNoise {
    BernoulliThreshold flip_zero;
    BernoulliThreshold flip_nonzero;
    explicit DimNoise(const NoiseSpec& n) : flip_zero(n.p_plus()), flip_nonzero(n.p_minus()) {}
};

inline const NoiseSpec& noise_for(const SamplerConfig& cfg, std::size_t dim) {
    if (!cfg.grouping) return cfg.noise;
    const auto& [a, b] = *cfg.grouping;
    if (dim >= a.begin && dim < a.end) return a.noise;
    return b.noise;
}

inline std::int32_t flip_target(std::int32_t current, int k, KeyedRng& rng) {
    if (k == 2) return current == 0 ? 1 : 0;
    // uniform over the K-1 other values
    auto offset = static_cast<std::int32_t>(rng.bounded(static_cast<std::uint64_t>(k - 1)));
    return static_cast<std::int32_t>((current + 1 + offset) % k);
}

}  // namespace detail

// Applies the randomization scheme once: zeros flip with p_plus, non-zeros
// with p_minus, uniformly over the other K-1 values. Deterministic under the
// caller-supplied rng state.
inline DiscreteVector perturb(const DiscreteVector& x, const NoiseSpec& noise, KeyedRng& rng) {
    const int k = noise.num_categories();
    x.check_for(k);
    detail::DimNoise thresholds(noise);
    DiscreteVector out = x;
    for (std::size_t i = 0; i < out.dims(); ++i) {
        const bool zero = out.values[i] == 0;
        const bool flip = (zero ? thresholds.flip_zero : thresholds.flip_nonzero).sample(rng);
        if (flip) out.values[i] = detail::flip_target(out.values[i], k, rng);
    }
    return out;
}

namespace detail {

inline DiscreteVector perturb_grouped(const DiscreteVector& x, const SamplerConfig& cfg,
                                      const std::vector<DimNoise>& thresholds, KeyedRng& rng) {
    const int k = cfg.noise.num_categories();
    DiscreteVector out = x;
    for (std::size_t i = 0; i < out.dims(); ++i) {
        const bool zero = out.values[i] == 0;
        const bool flip = (zero ? thresholds[i].flip_zero : thresholds[i].flip_nonzero).sample(rng);
        if (flip) out.values[i] = flip_target(out.values[i], k, rng);
    }
    return out;
}

}  // namespace detail

// Collects the two-stage Monte-Carlo votes. Sample s of stage t draws its
// own rng stream keyed (seed, stage, sample), so the result is identical at
// any parallelism and no draw is shared between the stages.
inline std::pair<VoteRecord, VoteRecord> collect_votes(const DiscreteVector& x, BaseClassifier& classifier,
                                                       const SamplerConfig& cfg, int num_classes,
                                                       const std::string& input_id = {}) {
    cfg.check(x.dims());
    x.check_for(cfg.noise.num_categories());
    if (num_classes < 1) throw CategoryError("num_classes must be positive");

    std::vector<detail::DimNoise> thresholds;
    thresholds.reserve(x.dims());
    for (std::size_t i = 0; i < x.dims(); ++i) thresholds.emplace_back(detail::noise_for(cfg, i));

    auto run_stage = [&](std::uint64_t stage, std::uint64_t num_samples) {
        const int jobs = cfg.jobs < 1 ? 1 : cfg.jobs;
        std::vector<std::vector<std::uint64_t>> partial(
            static_cast<std::size_t>(jobs), std::vector<std::uint64_t>(static_cast<std::size_t>(num_classes), 0));
        parallel_for(static_cast<std::size_t>(num_samples), jobs, [&](std::size_t s) {
            KeyedRng rng(cfg.seed, stage, static_cast<std::uint64_t>(s));
            DiscreteVector z = detail::perturb_grouped(x, cfg, thresholds, rng);
            int y;
            try {
                y = classifier.classify(z);
            } catch (const std::exception& e) {
                throw std::runtime_error("classifier failed on sample " + std::to_string(s) + " of stage " +
                                         std::to_string(stage) + ": " + e.what());
            }
            if (y < 0 || y >= num_classes)
                throw RangeError("classifier returned class " + std::to_string(y) + " outside [0," +
                                 std::to_string(num_classes) + ") on sample " + std::to_string(s));
            // parallel_for stripes statically, so stripe s % jobs is owned by one worker
            ++partial[s % static_cast<std::size_t>(jobs)][static_cast<std::size_t>(y)];
        });
        VoteRecord record;
        record.input_id = input_id;
        record.counts.assign(static_cast<std::size_t>(num_classes), 0);
        for (const auto& p : partial)
            for (std::size_t y = 0; y < p.size(); ++y) record.counts[y] += p[y];
        return record;
    };

    return {run_stage(0, cfg.num_selection), run_stage(1, cfg.num_estimation)};
}

// Majority-vote prediction with abstention: selection votes pick the class,
// estimation votes must put its lower bound above 1/2 at radius zero.
inline std::optional<int> smoothed_predict(const DiscreteVector& x, BaseClassifier& classifier,
                                           const SamplerConfig& cfg, int num_classes, const Rational& alpha) {
    auto [selection, estimation] = collect_votes(x, classifier, cfg, num_classes);
    ClassBounds bounds = confidence::two_stage_estimate(selection, estimation, alpha, Mode::binary_class);
    if (bounds.p_lower <= Rational(1, 2)) return std::nullopt;
    return bounds.top_class;
}

}  // namespace sparsecert::smoothing
