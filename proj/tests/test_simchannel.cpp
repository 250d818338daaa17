#include <doctest.h>

#include <random>
#include <sstream>

#include "geolock/simchannel.hpp"
#include "test_util.hpp"

using namespace geolock;

TEST_CASE("deliver") {
    Scenario scenario = test::canonical_scenario();
    KeySchedule schedule = build_schedule(scenario);

    SUBCASE("zero noise at the authorized point: exact slot gaps") {
        ArrivalTrace t = deliver(schedule, {"rx", {0, 0, 0}, Role::intended}, {0.0, 0});
        REQUIRE(t.arrivals.size() == 33);
        for (int n = 1; n < 33; ++n) {
            TickDelta gap = t.arrivals[static_cast<std::size_t>(n)].rx_time -
                            t.arrivals[static_cast<std::size_t>(n - 1)].rx_time;
            std::int64_t expected =
                159'744'000LL +
                static_cast<std::int64_t>(schedule.entries[static_cast<std::size_t>(n)].slot) * 426;
            CHECK(gap.value == expected);
        }
    }

    SUBCASE("zero noise, displaced: gaps shift by the path difference") {
        Point3 q{1.4, -0.3, 0.7};
        ArrivalTrace t = deliver(schedule, {"eve", q, Role::eavesdropper}, {0.0, 0});
        for (int n = 1; n < 33; ++n) {
            TickDelta gap = t.arrivals[static_cast<std::size_t>(n)].rx_time -
                            t.arrivals[static_cast<std::size_t>(n - 1)].rx_time;
            const auto& prev = schedule.entries[static_cast<std::size_t>(n - 1)];
            const auto& cur = schedule.entries[static_cast<std::size_t>(n)];
            std::int64_t expected = 159'744'000LL + static_cast<std::int64_t>(cur.slot) * 426 +
                                    path_difference_shift(prev.anchor, cur.anchor, {0, 0, 0}, q).value;
            CHECK(gap.value == expected);
        }
    }

    SUBCASE("same seed, same trace; different seed, different trace") {
        NoiseModel noise{80.0, 99};
        ArrivalTrace a = deliver(schedule, {"rx", {0, 0, 0}, Role::intended}, noise);
        ArrivalTrace b = deliver(schedule, {"rx", {0, 0, 0}, Role::intended}, noise);
        REQUIRE(a.arrivals.size() == b.arrivals.size());
        for (std::size_t i = 0; i < a.arrivals.size(); ++i)
            CHECK(a.arrivals[i].rx_time.value == b.arrivals[i].rx_time.value);

        ArrivalTrace c = deliver(schedule, {"rx", {0, 0, 0}, Role::intended}, {80.0, 100});
        int moved = 0;
        for (std::size_t i = 1; i < c.arrivals.size(); ++i)
            if (c.arrivals[i].rx_time.value != a.arrivals[i].rx_time.value) ++moved;
        CHECK(moved > 20);
    }

    SUBCASE("each gap sees exactly one noise sample") {
        NoiseModel noise{60.0, 7};
        ArrivalTrace noisy = deliver(schedule, {"rx", {0, 0, 0}, Role::intended}, noise);
        ArrivalTrace clean = deliver(schedule, {"rx", {0, 0, 0}, Role::intended}, {0.0, 7});
        for (int n = 1; n < 33; ++n) {
            TickDelta gn = noisy.arrivals[static_cast<std::size_t>(n)].rx_time -
                           noisy.arrivals[static_cast<std::size_t>(n - 1)].rx_time;
            TickDelta gc = clean.arrivals[static_cast<std::size_t>(n)].rx_time -
                           clean.arrivals[static_cast<std::size_t>(n - 1)].rx_time;
            CHECK(gn.value - gc.value ==
                  noise.sample("rx", static_cast<std::uint32_t>(n)).value);
        }
    }
}

TEST_CASE("run_scenario") {
    Scenario scenario = test::canonical_scenario();
    scenario.receivers = {{"good", {0, 0, 0}, Role::intended},
                          {"eve", {10, 0, 0}, Role::eavesdropper}};
    std::vector<std::uint8_t> payload{'s', 'e', 'c', 'r', 'e', 't'};

    SUBCASE("intended succeeds, eavesdropper fails") {
        ScenarioReport report = run_scenario(scenario, payload);
        REQUIRE(report.receivers.size() == 2);
        CHECK(report.receivers[0].decrypt_ok);
        CHECK(report.receivers[0].byte_errors == 0);
        CHECK(report.receivers[0].key_hex == derive_key(scenario.password).hex());
        CHECK_FALSE(report.receivers[1].decrypt_ok);
        CHECK(report.receivers[1].byte_errors >= 1);
        CHECK(report.intended_all_ok());
        CHECK_FALSE(report.single_anchor_warning);
        CHECK(report.to_text().find("eavesdropper") != std::string::npos);
    }

    SUBCASE("zero receivers: empty report, vacuous success") {
        scenario.receivers.clear();
        ScenarioReport report = run_scenario(scenario, payload);
        CHECK(report.receivers.empty());
        CHECK(report.intended_all_ok());
    }

    SUBCASE("single anchor: everyone succeeds, warning raised") {
        scenario.anchors = {{"A", {-5, 0, 0}}};
        ScenarioReport report = run_scenario(scenario, payload);
        CHECK(report.single_anchor_warning);
        CHECK(report.receivers[0].decrypt_ok);
        CHECK(report.receivers[1].decrypt_ok);  // the leak, by construction
    }

    SUBCASE("reports are deterministic") {
        ScenarioReport a = run_scenario(scenario, payload);
        ScenarioReport b = run_scenario(scenario, payload);
        CHECK(a.to_json().dump() == b.to_json().dump());
    }

    SUBCASE("moderate noise: intended receiver still succeeds") {
        scenario.noise = {426.0 / 10.0, 12345};
        ScenarioReport report = run_scenario(scenario, payload);
        CHECK(report.receivers[0].decrypt_ok);
    }
}

TEST_CASE("spatial sweep") {
    Scenario scenario = test::canonical_scenario();

    SUBCASE("center row recovers; parallel equals serial") {
        GridSpec grid{{-3, -1, 0}, {3, 1, 0}, {31, 3, 1}};
        auto rows = spatial_sweep(scenario, grid);
        auto serial = spatial_sweep_serial(scenario, grid);
        REQUIRE(rows.size() == 31u * 3u);
        REQUIRE(serial.size() == rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CHECK(rows[i].pos == serial[i].pos);
            CHECK(rows[i].byte_errors == serial[i].byte_errors);
            CHECK(rows[i].key_recovered == serial[i].key_recovered);
        }
        bool center_found = false;
        for (const auto& r : rows)
            if (r.pos == Point3{0, 0, 0}) {
                center_found = true;
                CHECK(r.byte_errors == 0);
                CHECK(r.key_recovered);
            }
        CHECK(center_found);
    }

    SUBCASE("row-major order: x slowest, z fastest") {
        GridSpec grid{{0, 0, 0}, {1, 1, 1}, {2, 2, 2}};
        auto rows = spatial_sweep(scenario, grid);
        REQUIRE(rows.size() == 8);
        CHECK(rows[0].pos == Point3{0, 0, 0});
        CHECK(rows[1].pos == Point3{0, 0, 1});
        CHECK(rows[2].pos == Point3{0, 1, 0});
        CHECK(rows[4].pos == Point3{1, 0, 0});
    }

    SUBCASE("single anchor: zero errors everywhere") {
        scenario.anchors = {{"A", {-5, 0, 0}}};
        auto rows = spatial_sweep(scenario, {{-40, -40, 0}, {40, 40, 0}, {9, 9, 1}});
        for (const auto& r : rows) CHECK(r.byte_errors == 0);
    }

    SUBCASE("success region grows with the radius") {
        GridSpec grid{{-4, 0, 0}, {4, 0, 0}, {81, 1, 1}};
        auto small = spatial_sweep(scenario, grid);
        Scenario bigger = scenario;
        bigger.region.radius_m = 4.0;
        auto large = spatial_sweep(bigger, grid);
        for (std::size_t i = 0; i < small.size(); ++i)
            if (small[i].key_recovered) CHECK(large[i].key_recovered);
    }

    SUBCASE("grid ceiling") {
        CHECK_THROWS_AS(spatial_sweep(scenario, {{0, 0, 0}, {1, 1, 1}, {101, 101, 101}}),
                        ResourceError);
    }

    SUBCASE("csv shape") {
        std::ostringstream out;
        write_sweep_csv(out, spatial_sweep(scenario, {{0, 0, 0}, {1, 0, 0}, {2, 1, 1}}));
        std::string csv = out.str();
        CHECK(csv.rfind("x,y,z,byte_errors,key_recovered\n", 0) == 0);
        CHECK(csv.find("0,0,0,0,1\n") != std::string::npos);
    }
}

TEST_CASE("simulated and analytic decodes agree everywhere") {
    std::mt19937_64 rng(67);
    for (int trial = 0; trial < 40; ++trial) {
        Scenario scenario;
        int anchor_count = 1 + static_cast<int>(rng() % 6);
        scenario.anchors = test::random_anchors(rng, anchor_count);
        scenario.region = {test::random_point(rng, 20.0), 0.5 + (rng() % 40) / 10.0};
        scenario.password = "pw" + std::to_string(rng());
        scenario.noise = {0.0, 0};
        KeySchedule schedule = build_schedule(scenario);
        for (int p = 0; p < 20; ++p) {
            Point3 q = test::random_point(rng, 60.0);
            auto analytic = analytic_decode_slots(schedule, q);
            SlotDecode simulated =
                decode_slots(deliver(schedule, {"probe", q, Role::eavesdropper}, {0.0, 0}),
                             schedule.slot_width);
            for (int i = 0; i < 32; ++i)
                CHECK(analytic[static_cast<std::size_t>(i)] ==
                      simulated.raw_slots[static_cast<std::size_t>(i)]);
        }
    }
}
