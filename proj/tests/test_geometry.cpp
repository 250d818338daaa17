#include <doctest.h>

#include <cmath>
#include <random>

#include "geolock/geometry.hpp"
#include "test_util.hpp"

using namespace geolock;

namespace {

// Independent high-precision oracle for tof rounding: scaled integer
// arithmetic over the exact rational dist * K_f / c.
std::int64_t tof_oracle(double dist_m) {
    long double ticks = static_cast<long double>(dist_m) * kTicksPerSecond /
                        static_cast<long double>(kSpeedOfLightMps);
    return static_cast<std::int64_t>(std::llroundl(ticks));
}

}  // namespace

TEST_CASE("tof_ticks fixed points") {
    Anchor a{"a", {0, 0, 0}};
    CHECK(tof_ticks(a, {0, 0, 0}).value == 0);
    CHECK(tof_ticks(a, {3, 0, 0}).value == 639);
    CHECK(tof_ticks(a, {2, 0, 0}).value == 426);
    CHECK(tof_ticks(a, {0, 0, 5}).value == 1066);
    CHECK(tof_ticks(a, {1.06, 0, 0}).value == 226);  // just past half a 2 m slot
}

TEST_CASE("tof_ticks properties") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 2000; ++i) {
        Point3 p = test::random_point(rng);
        Point3 q = test::random_point(rng);
        Point3 r = test::random_point(rng);
        Anchor ap{"p", p}, aq{"q", q}, ar{"r", r};

        auto pq = tof_ticks(ap, q);
        CHECK(pq.value >= 0);
        CHECK(pq.value == tof_ticks(aq, p).value);                  // symmetric
        CHECK(pq.value == tof_oracle(distance_m(p, q)));            // oracle agreement
        // Triangle inequality within rounding.
        CHECK(pq.value <= tof_ticks(ap, r).value + tof_ticks(ar, q).value + 1);
    }
}

TEST_CASE("slot width from region") {
    // 2 m radius: 6.667 ns, 426 ticks.
    AuthorizedRegion two_m{{0, 0, 0}, 2.0};
    CHECK(slot_width_from_region(two_m).ticks().value == 426);
    double ns = 2.0 / kSpeedOfLightMps * 1e9;
    CHECK(ns == doctest::Approx(6.667).epsilon(1e-3));

    CHECK(slot_width_from_region({{0, 0, 0}, 0.01}).ticks().value == 2);
    // Sub-tick regions clamp to the 1-tick floor.
    CHECK(slot_width_from_region({{0, 0, 0}, 0.001}).ticks().value == 1);

    CHECK_THROWS_AS(slot_width_from_region({{0, 0, 0}, 0.0}), ConfigError);
    CHECK_THROWS_AS(slot_width_from_region({{0, 0, 0}, -2.0}), ConfigError);
    // A region so large the worst-case schedule cannot fit the window.
    CHECK_THROWS_AS(slot_width_from_region({{0, 0, 0}, 1200.0}), ConfigError);

    // Monotone in radius.
    std::int64_t prev = 0;
    for (double r = 0.5; r < 500.0; r *= 1.7) {
        std::int64_t w = slot_width_from_region({{0, 0, 0}, r}).ticks().value;
        CHECK(w >= prev);
        prev = w;
    }
}

TEST_CASE("slot width floor") {
    CHECK_THROWS_AS(SlotWidth{TickDelta{0}}, ConfigError);
    CHECK_THROWS_AS(SlotWidth{TickDelta{-5}}, ConfigError);
    CHECK(SlotWidth{TickDelta{1}}.ticks().value == 1);
}

TEST_CASE("path_difference_shift") {
    Anchor a{"a", {-5, 0, 0}};
    Anchor b{"b", {5, 0, 0}};
    Point3 authorized{0, 0, 0};

    SUBCASE("no displacement, no shift") {
        std::mt19937_64 rng(5);
        for (int i = 0; i < 200; ++i) {
            Point3 p = test::random_point(rng);
            CHECK(path_difference_shift(a, b, p, p).value == 0);
        }
    }

    SUBCASE("same anchor cancels at any point") {
        std::mt19937_64 rng(6);
        for (int i = 0; i < 200; ++i) {
            Point3 q = test::random_point(rng);
            CHECK(path_difference_shift(a, a, authorized, q).value == 0);
            CHECK(path_difference_shift(b, b, authorized, q).value == 0);
        }
    }

    SUBCASE("opposed anchors, 1.06 m displacement exceeds half a 2 m slot") {
        // Brute-force geometric oracle: the shift is the change in path
        // difference (d_b - d_a), which for opposed anchors on the probe
        // axis is twice the displacement.
        Point3 q{1.06, 0, 0};
        TickDelta shift = path_difference_shift(a, b, authorized, q);
        double expected_m = (distance_m(b.position, q) - distance_m(b.position, authorized)) -
                            (distance_m(a.position, q) - distance_m(a.position, authorized));
        CHECK(expected_m == doctest::Approx(-2.12));  // toward b: b's path shortens
        CHECK(std::llabs(shift.value) > 426 / 2);
        CHECK(shift.value == doctest::Approx(expected_m * kTicksPerSecond / kSpeedOfLightMps)
                                 .epsilon(0.01));
    }
}

TEST_CASE("worst case span closed form") {
    CHECK(worst_case_span(SlotWidth{TickDelta{426}}).value ==
          32 * (159'744'000LL + 255 * 426));
}
