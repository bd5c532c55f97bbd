#pragma once

#include <algorithm>
#include <cstdint>

#include "sparsecert/errors.hpp"
#include "sparsecert/exactmath.hpp"
#include "sparsecert/types.hpp"

namespace sparsecert::confidence {

namespace detail {

// argmax count, ties broken by smallest class id
inline int top_class(const VoteRecord& votes) {
    if (votes.counts.empty()) throw EmptyVotes("vote record has no classes");
    int best = 0;
    for (int y = 1; y < static_cast<int>(votes.counts.size()); ++y)
        if (votes.counts[static_cast<std::size_t>(y)] > votes.counts[static_cast<std::size_t>(best)]) best = y;
    return best;
}

}  // namespace detail

// Binary-class bounds: Clopper-Pearson lower bound on the majority class at
// level alpha; the runner-up is bounded by 1 - p_lower.
inline ClassBounds binary_bounds(const VoteRecord& votes, const Rational& alpha) {
    const std::uint64_t n = votes.num_samples();
    if (n == 0) throw EmptyVotes("vote record has no samples");
    ClassBounds bounds;
    bounds.mode = Mode::binary_class;
    bounds.alpha = alpha;
    bounds.top_class = detail::top_class(votes);
    bounds.p_lower = exactmath::clopper_pearson_lower(votes.counts[static_cast<std::size_t>(bounds.top_class)], n, alpha);
    bounds.p_upper_runner = 1 - bounds.p_lower;
    return bounds;
}

// Multi-class bounds holding simultaneously at level alpha via Bonferroni:
// each per-class Clopper-Pearson interval runs at alpha / num_classes, and
// the runner-up bound is the largest upper bound among the other classes.
inline ClassBounds multiclass_bounds(const VoteRecord& votes, const Rational& alpha, int num_classes) {
    const std::uint64_t n = votes.num_samples();
    if (n == 0) throw EmptyVotes("vote record has no samples");
    if (num_classes < static_cast<int>(votes.counts.size()))
        throw CategoryError("declared class count below the number of observed classes");
    const Rational corrected = alpha / num_classes;

    ClassBounds bounds;
    bounds.mode = Mode::multi_class;
    bounds.alpha = alpha;
    bounds.top_class = detail::top_class(votes);
    bounds.p_lower = exactmath::clopper_pearson_lower(votes.counts[static_cast<std::size_t>(bounds.top_class)], n, corrected);

    // CP upper is monotone in the count, so the runner-up bound comes from the
    // largest non-top count; classes declared but never observed count as 0.
    std::uint64_t runner_count = 0;
    bool have_other = votes.counts.size() < static_cast<std::size_t>(num_classes);
    for (int y = 0; y < static_cast<int>(votes.counts.size()); ++y) {
        if (y == bounds.top_class) continue;
        runner_count = std::max(runner_count, votes.counts[static_cast<std::size_t>(y)]);
        have_other = true;
    }
    bounds.p_upper_runner = have_other ? exactmath::clopper_pearson_upper(runner_count, n, corrected) : Rational(0);
    return bounds;
}

// Two-stage estimation: the class is selected on the first record, the
// bounds are computed from the second record only, so selection never biases
// the interval.
inline ClassBounds two_stage_estimate(const VoteRecord& selection, const VoteRecord& estimation,
                                      const Rational& alpha, Mode mode) {
    if (selection.num_samples() == 0) throw EmptyVotes("selection record has no samples");
    const std::uint64_t n = estimation.num_samples();
    if (n == 0) throw EmptyVotes("estimation record has no samples");
    if (selection.counts.size() != estimation.counts.size())
        throw CategoryError("selection and estimation records declare different class counts");

    const int y_star = detail::top_class(selection);
    ClassBounds bounds;
    bounds.mode = mode;
    bounds.alpha = alpha;
    bounds.top_class = y_star;
    if (mode == Mode::binary_class) {
        bounds.p_lower = exactmath::clopper_pearson_lower(estimation.counts[static_cast<std::size_t>(y_star)], n, alpha);
        bounds.p_upper_runner = 1 - bounds.p_lower;
        return bounds;
    }
    const int num_classes = static_cast<int>(estimation.counts.size());
    const Rational corrected = alpha / num_classes;
    bounds.p_lower = exactmath::clopper_pearson_lower(estimation.counts[static_cast<std::size_t>(y_star)], n, corrected);
    std::uint64_t runner_count = 0;
    bool have_other = false;
    for (int y = 0; y < num_classes; ++y) {
        if (y == y_star) continue;
        runner_count = std::max(runner_count, estimation.counts[static_cast<std::size_t>(y)]);
        have_other = true;
    }
    bounds.p_upper_runner = have_other ? exactmath::clopper_pearson_upper(runner_count, n, corrected) : Rational(0);
    return bounds;
}

}  // namespace sparsecert::confidence
