#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <vector>

#include "sparsecert/oracle.hpp"
#include "sparsecert/regions.hpp"

using namespace sparsecert;

namespace {

bool tables_equal(const RegionTable& a, const RegionTable& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a.entries[i].ratio == b.entries[i].ratio)) return false;
        if (a.entries[i].prob_x != b.entries[i].prob_x) return false;
        if (a.entries[i].prob_xt != b.entries[i].prob_xt) return false;
    }
    return true;
}

// Pads the canonical pair with trailing dimensions on which x and x~ agree.
std::pair<DiscreteVector, DiscreteVector> padded_pair(const RadiiSpec& radii, int k, std::size_t dims,
                                                      std::int32_t fill) {
    auto [x, xt] = sphere_representatives(radii, k);
    while (x.dims() < dims) {
        x.values.push_back(fill);
        xt.values.push_back(fill);
    }
    return {std::move(x), std::move(xt)};
}

}  // namespace

TEST_CASE("binary regions: worked example (0.2, 0.4, ra=1, rd=1)") {
    NoiseSpec noise = validate_noise_spec("0.2", "0.4", 2);
    RegionTable table = regions::binary_regions(noise, RadiiSpec(1, 1));
    REQUIRE(table.size() == 3);
    CHECK(table.entries[0].ratio == RatioValue::finite(Rational(6)));
    CHECK(table.entries[0].prob_x == Rational(12, 25));
    CHECK(table.entries[0].prob_xt == Rational(2, 25));
    CHECK(table.entries[1].ratio == RatioValue::finite(Rational(1)));
    CHECK(table.entries[1].prob_x == Rational(11, 25));
    CHECK(table.entries[1].prob_xt == Rational(11, 25));
    CHECK(table.entries[2].ratio == RatioValue::finite(Rational(1, 6)));
    CHECK(table.entries[2].prob_x == Rational(2, 25));
    CHECK(table.entries[2].prob_xt == Rational(12, 25));
}

TEST_CASE("binary regions: zero radii collapse to one region") {
    NoiseSpec noise = validate_noise_spec("0.35", "0.15", 2);
    RegionTable table = regions::binary_regions(noise, RadiiSpec(0, 0));
    REQUIRE(table.size() == 1);
    CHECK(table.entries[0].ratio == RatioValue::finite(Rational(1)));
    CHECK(table.entries[0].prob_x == 1);
}

TEST_CASE("binary regions: p+ + p- = 1 merges everything") {
    NoiseSpec noise = validate_noise_spec("0.3", "0.7", 2);
    RegionTable table = regions::binary_regions(noise, RadiiSpec(2, 1));
    REQUIRE(table.size() == 1);
    CHECK(table.entries[0].ratio == RatioValue::finite(Rational(1)));
}

TEST_CASE("binary regions: traversal direction follows p+ + p-") {
    // q = 0 has prob_x = (1-p+)^ra (1-p-)^rd; the top-ratio region is q = 0
    // exactly when p+ + p- < 1.
    RadiiSpec radii(2, 1);
    auto pmf0 = [&](const NoiseSpec& n) -> Rational {
        return pow_int(1 - n.p_plus(), 2) * pow_int(1 - n.p_minus(), 1);
    };

    NoiseSpec low = validate_noise_spec("0.2", "0.3", 2);
    CHECK(regions::binary_regions(low, radii).entries.front().prob_x == pmf0(low));

    NoiseSpec high = validate_noise_spec("0.8", "0.7", 2);
    CHECK(regions::binary_regions(high, radii).entries.back().prob_x == pmf0(high));
}

TEST_CASE("binary regions reject boundary probabilities") {
    CHECK_THROWS_AS(regions::binary_regions(validate_noise_spec("0", "0.4", 2), RadiiSpec(1, 1)), BoundaryError);
    CHECK_THROWS_AS(regions::binary_regions(validate_noise_spec("0.4", "1", 2), RadiiSpec(1, 1)), BoundaryError);
    CHECK_THROWS_AS(regions::binary_regions(validate_noise_spec("0.4", "0.4", 3), RadiiSpec(1, 1)), CategoryError);
}

TEST_CASE("special regions: worked examples") {
    SECTION("p+ = 0") {
        NoiseSpec noise = validate_noise_spec("0", "0.4", 2);
        RegionTable table = regions::special_regions(noise, RadiiSpec(1, 2));
        REQUIRE(table.size() == 3);
        CHECK(table.entries[0].ratio.is_infinite());
        CHECK(table.entries[0].prob_x == Rational(21, 25));  // 1 - 0.4^2
        CHECK(table.entries[1].prob_x == Rational(4, 25));   // 0.4^2
        CHECK(table.entries[1].prob_xt == Rational(2, 5));   // 0.4^1
        CHECK(table.entries[2].prob_x == 0);
        CHECK(table.entries[2].prob_xt == Rational(3, 5));  // 1 - 0.4^1
    }
    SECTION("p- = 0 mirrors with p+") {
        NoiseSpec noise = validate_noise_spec("0.2", "0", 2);
        RegionTable table = regions::special_regions(noise, RadiiSpec(2, 1));
        REQUIRE(table.size() == 3);
        CHECK(table.entries[0].prob_x == Rational(24, 25));  // 1 - 0.2^2
        CHECK(table.entries[1].prob_x == Rational(1, 25));   // 0.2^2
        CHECK(table.entries[1].prob_xt == Rational(1, 5));   // 0.2^1
        CHECK(table.entries[2].prob_xt == Rational(4, 5));   // 1 - 0.2^1

        auto [x, xt] = sphere_representatives(RadiiSpec(2, 1), 2);
        CHECK(tables_equal(table, oracle::enumerate_regions(x, xt, noise)));
    }
    SECTION("zero radii leave a single full region") {
        NoiseSpec noise = validate_noise_spec("0", "0.4", 2);
        RegionTable table = regions::special_regions(noise, RadiiSpec(0, 0));
        REQUIRE(table.size() == 1);
        CHECK(table.entries[0].prob_x == 1);
        CHECK(table.entries[0].prob_xt == 1);
    }
}

TEST_CASE("special regions reject non-boundary input") {
    CHECK_THROWS_AS(regions::special_regions(validate_noise_spec("0.2", "0.4", 2), RadiiSpec(1, 1)), BoundaryError);
    CHECK_THROWS_AS(regions::special_regions(validate_noise_spec("0", "0", 2), RadiiSpec(1, 1)), BoundaryError);
    CHECK_THROWS_AS(regions::special_regions(validate_noise_spec("0", "1", 2), RadiiSpec(1, 1)), BoundaryError);
}

TEST_CASE("discrete regions: K=3 equal probabilities worked example") {
    NoiseSpec noise = validate_noise_spec("0.3", "0.3", 3);
    RegionTable table = regions::discrete_regions(noise, RadiiSpec(1, 0, 0));
    REQUIRE(table.size() == 3);
    // keyed by q' - p' in {1, 0, -1}: probs (0.7, 0.15, 0.15)
    Rational base = Rational(7, 10) / Rational(3, 20);
    CHECK(table.entries[0].ratio == RatioValue::finite(base));
    CHECK(table.entries[0].prob_x == Rational(7, 10));
    CHECK(table.entries[1].ratio == RatioValue::finite(Rational(1)));
    CHECK(table.entries[1].prob_x == Rational(3, 20));
    CHECK(table.entries[2].ratio == RatioValue::finite(1 / base));
    CHECK(table.entries[2].prob_x == Rational(3, 20));
}

TEST_CASE("discrete regions: zero radii and boundary rejection") {
    NoiseSpec noise = validate_noise_spec("0.25", "0.5", 5);
    RegionTable table = regions::discrete_regions(noise, RadiiSpec(0, 0, 0));
    REQUIRE(table.size() == 1);
    CHECK(table.entries[0].prob_x == 1);

    CHECK_THROWS_AS(regions::discrete_regions(validate_noise_spec("0", "0.5", 5), RadiiSpec(1, 0, 0)),
                    BoundaryError);
    CHECK_THROWS_AS(regions::discrete_regions(validate_noise_spec("0.5", "1", 5), RadiiSpec(1, 0, 0)),
                    BoundaryError);
    CHECK_THROWS_AS(regions::discrete_regions(validate_noise_spec("0.5", "0.5", 2), RadiiSpec(1, 0, 0)),
                    CategoryError);
}

TEST_CASE("discrete regions match the enumeration oracle (K=4, r=(1,1,1))") {
    NoiseSpec noise = validate_noise_spec("0.2", "0.5", 4);
    RadiiSpec radii(1, 1, 1);
    RegionTable table = regions::discrete_regions(noise, radii);
    CHECK(table.size() <= 27);  // T0*T1*T2 before merging
    CHECK(table.size() <= 16);  // (r+1)^2 after merging

    auto [x, xt] = sphere_representatives(radii, 4);
    CHECK(tables_equal(table, oracle::enumerate_regions(x, xt, noise)));
}

TEST_CASE("discrete region counts: 2r+1 when p+ = p-, else at most (r+1)^2") {
    for (int k : {3, 4, 6})
        for (long r0 = 0; r0 <= 2; ++r0)
            for (long r1 = 0; r1 <= 2; ++r1)
                for (long r2 = 0; r2 <= 1; ++r2) {
                    if (r0 + r1 + r2 == 0) continue;
                    long r = r0 + r1 + r2;
                    NoiseSpec equal(Rational(3, 10), Rational(3, 10), k);
                    CHECK(regions::discrete_regions(equal, RadiiSpec(r0, r1, r2)).size() ==
                          static_cast<std::size_t>(2 * r + 1));
                    NoiseSpec skew(Rational(1, 5), Rational(3, 5), k);
                    CHECK(regions::discrete_regions(skew, RadiiSpec(r0, r1, r2)).size() <=
                          static_cast<std::size_t>((r + 1) * (r + 1)));
                }
}

TEST_CASE("equal TripletKey implies equal per-configuration ratio") {
    // first-principles ratio of a single triplet configuration
    NoiseSpec noise = validate_noise_spec("0.15", "0.45", 5);
    auto config_ratio = [&](long q0, long p0, long s0, long q1, long p1, long s1, long q2, long p2) -> Rational {
        Rational num = pow_int(noise.a0(), q0) * pow_int(noise.b0(), p0) * pow_int(noise.b0(), s0) *
                       pow_int(noise.a1(), q1) * pow_int(noise.b1(), p1) * pow_int(noise.b1(), s1) *
                       pow_int(noise.a1(), q2) * pow_int(noise.b1(), p2);
        Rational den = pow_int(noise.b1(), q0) * pow_int(noise.a1(), p0) * pow_int(noise.b1(), s0) *
                       pow_int(noise.b0(), q1) * pow_int(noise.a0(), p1) * pow_int(noise.b0(), s1) *
                       pow_int(noise.b1(), q2) * pow_int(noise.a1(), p2);
        return num / den;
    };
    const long r0 = 2, r1 = 2, r2 = 2;
    std::map<regions::TripletKey, Rational> seen;
    for (long q0 = 0; q0 <= r0; ++q0)
        for (long p0 = 0; p0 + q0 <= r0; ++p0)
            for (long q1 = 0; q1 <= r1; ++q1)
                for (long p1 = 0; p1 + q1 <= r1; ++p1)
                    for (long q2 = 0; q2 <= r2; ++q2)
                        for (long p2 = 0; p2 + q2 <= r2; ++p2) {
                            long s0 = r0 - q0 - p0, s1 = r1 - q1 - p1;
                            regions::TripletKey key{q0 - p1, p0 - q1, s0 - s1, q2 - p2};
                            Rational ratio = config_ratio(q0, p0, s0, q1, p1, s1, q2, p2);
                            auto [it, inserted] = seen.emplace(key, ratio);
                            if (!inserted) CHECK(it->second == ratio);
                            CHECK(regions::triplet_ratio(noise, key) == ratio);
                        }
}

TEST_CASE("joint regions") {
    NoiseSpec noise_a = validate_noise_spec("0.2", "0.4", 2);
    NoiseSpec noise_f = validate_noise_spec("0.1", "0.3", 2);
    RegionTable table_a = regions::binary_regions(noise_a, RadiiSpec(1, 1));
    RegionTable table_f = regions::binary_regions(noise_f, RadiiSpec(1, 0));

    SECTION("size is bounded by the product") {
        RegionTable joint = regions::joint_regions(table_a, table_a);
        CHECK(joint.size() <= 9);
    }
    SECTION("a trivial factor is an identity") {
        CHECK(tables_equal(regions::joint_regions(table_a, regions::trivial_regions()), table_a));
    }
    SECTION("matches a per-point product oracle on the concatenated space") {
        auto [xa, xta] = sphere_representatives(RadiiSpec(1, 1), 2);
        auto [xf, xtf] = sphere_representatives(RadiiSpec(1, 0), 2);
        // enumerate the concatenated 3-bit space with per-group noise
        std::map<std::pair<bool, Rational>, std::pair<Rational, Rational>> grouped;
        for (int za = 0; za < 4; ++za)
            for (int zf = 0; zf < 2; ++zf) {
                DiscreteVector va{{za & 1, (za >> 1) & 1}};
                DiscreteVector vf{{zf}};
                Rational px = oracle::point_prob(xa, va, noise_a) * oracle::point_prob(xf, vf, noise_f);
                Rational pxt = oracle::point_prob(xta, va, noise_a) * oracle::point_prob(xtf, vf, noise_f);
                if (px == 0 && pxt == 0) continue;
                std::pair<bool, Rational> key{pxt == 0, pxt == 0 ? Rational(0) : px / pxt};
                grouped[key].first += px;
                grouped[key].second += pxt;
            }
        RegionTable joint = regions::joint_regions(table_a, table_f);
        REQUIRE(joint.size() == grouped.size());
        for (const Region& r : joint.entries) {
            std::pair<bool, Rational> key{r.ratio.is_infinite(),
                                          r.ratio.is_infinite() ? Rational(0) : r.ratio.value()};
            REQUIRE(grouped.count(key) == 1);
            CHECK(grouped[key].first == r.prob_x);
            CHECK(grouped[key].second == r.prob_xt);
        }
    }
    SECTION("special-case factors keep the unreachable mass") {
        NoiseSpec special = validate_noise_spec("0", "0.4", 2);
        RegionTable table_s = regions::special_regions(special, RadiiSpec(1, 1));
        RegionTable joint = regions::joint_regions(table_s, table_f);
        Rational sum_x(0), sum_xt(0);
        for (const Region& r : joint.entries) {
            sum_x += r.prob_x;
            sum_xt += r.prob_xt;
        }
        CHECK(sum_x == 1);
        CHECK(sum_xt == 1);
    }
}

TEST_CASE("oracle equivalence is data independent") {
    NoiseSpec noise = validate_noise_spec("0.2", "0.4", 2);
    RadiiSpec radii(1, 2);
    RegionTable expected = regions::binary_regions(noise, radii);
    for (std::size_t dims : {3u, 5u, 7u})
        for (std::int32_t fill : {0, 1}) {
            auto [x, xt] = padded_pair(radii, 2, dims, fill);
            CHECK(tables_equal(expected, oracle::enumerate_regions(x, xt, noise)));
        }
}

TEST_CASE("oracle equivalence holds out to d = 8") {
    for (auto [pp, pm] : std::vector<std::pair<const char*, const char*>>{{"0.2", "0.4"}, {"0.7", "0.6"}})
        for (auto [ra, rd] : std::vector<std::pair<long, long>>{{4, 4}, {3, 5}}) {
            NoiseSpec noise = validate_noise_spec(pp, pm, 2);
            auto [x, xt] = sphere_representatives(RadiiSpec(ra, rd), 2);
            CHECK(tables_equal(regions::binary_regions(noise, RadiiSpec(ra, rd)),
                               oracle::enumerate_regions(x, xt, noise)));
        }
}

TEST_CASE("binary regions equal the oracle across a probability grid") {
    for (int pp = 1; pp <= 9; pp += 2)
        for (int pm = 1; pm <= 9; pm += 2)
            for (long ra = 0; ra <= 2; ++ra)
                for (long rd = 0; rd <= 2; ++rd) {
                    NoiseSpec noise(make_rational(pp, 10), make_rational(pm, 10), 2);
                    auto [x, xt] = sphere_representatives(RadiiSpec(ra, rd), 2);
                    RegionTable got = regions::binary_regions(noise, RadiiSpec(ra, rd));
                    CHECK(tables_equal(got, oracle::enumerate_regions(x, xt, noise)));
                }
}
