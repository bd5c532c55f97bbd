#pragma once

#include <cstdint>

#include "sparsecert/rational.hpp"

namespace sparsecert {

// Counter-based keyed generator: SplitMix64 evaluated at
// (derived key) + (draw counter) * golden gamma. Stateless apart from the
// counter, platform-stable, and cheap to key per (seed, stage, sample), which
// makes vote collection bit-identical at any thread count.
class KeyedRng {
  public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix64(std::uint64_t z) {
        z ^= z >> 33;
        z *= 0xFF51AFD7ED558CCDull;
        z ^= z >> 33;
        z *= 0xC4CEB9FE1A85EC53ull;
        z ^= z >> 33;
        return z;
    }

    KeyedRng(std::uint64_t seed, std::uint64_t stream_a = 0, std::uint64_t stream_b = 0) {
        std::uint64_t k = mix64(seed + kGamma);
        k = mix64(k ^ (stream_a + kGamma));
        key_ = mix64(k ^ (stream_b + kGamma));
    }

    std::uint64_t next() {
        std::uint64_t z = key_ + (++counter_) * kGamma;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // unbiased-enough bounded draw (Lemire multiply-shift, deterministic)
    std::uint64_t bounded(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

  private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

// Exact-threshold Bernoulli: flips when a 64-bit draw falls below
// floor(p * 2^64). The bias against the rational p is below 2^-64.
class BernoulliThreshold {
  public:
    explicit BernoulliThreshold(const Rational& p) {
        if (p <= 0) {
            always_ = false;
            threshold_ = 0;
        } else if (p >= 1) {
            always_ = true;
            threshold_ = 0;
        } else {
            static_assert(sizeof(unsigned long) == 8, "64-bit unsigned long required");
            Integer t = (p.get_num() << 64) / p.get_den();  // < 2^64 since p < 1
            always_ = false;
            threshold_ = mpz_get_ui(t.get_mpz_t());
        }
    }

    bool sample(KeyedRng& rng) const {
        if (always_) return true;
        return rng.next() < threshold_;
    }

  private:
    std::uint64_t threshold_ = 0;
    bool always_ = false;
};

}  // namespace sparsecert
