#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "geolock/scenario.hpp"
#include "test_util.hpp"

using namespace geolock;
using nlohmann::json;

namespace {

json valid_scenario_json() {
    return json{
        {"anchors", json::array({{{"id", "A"}, {"pos", {-5.0, 0.0, 0.0}}},
                                 {{"id", "B"}, {"pos", {5.0, 0.0, 0.0}}}})},
        {"authorized_region", {{"center", {0.0, 0.0, 0.0}}, {"radius_m", 2.0}}},
        {"receivers", json::array({{{"id", "rx"}, {"pos", {0.0, 0.0, 0.0}}, {"role", "intended"}}})},
        {"password", "hunter2hunter2"},
        {"noise", {{"sigma_ticks", 0.0}, {"seed", 42}}},
    };
}

std::vector<std::string> violations_of(const json& j) {
    try {
        scenario_from_json(j);
    } catch (const ConfigError& e) {
        return e.violations;
    }
    return {};
}

bool has_violation(const json& j, std::string_view needle) {
    for (const auto& v : violations_of(j))
        if (v.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("valid scenario parses") {
    Scenario s = scenario_from_json(valid_scenario_json());
    CHECK(s.anchors.size() == 2);
    CHECK(s.receivers.size() == 1);
    CHECK(s.receivers[0].role == Role::intended);
    CHECK(s.noise.sigma_ticks == 0.0);
    CHECK(s.noise.seed == 42);
    CHECK(s.slot_width().ticks().value == 426);
    CHECK(s.schedule_anchors().size() == 33);
    CHECK_FALSE(s.single_anchor());
}

TEST_CASE("round-robin without anchor_sequence, pinned with") {
    Scenario s = scenario_from_json(valid_scenario_json());
    auto seq = s.schedule_anchors();
    CHECK(seq[0].id == "A");
    CHECK(seq[1].id == "B");
    CHECK(seq[2].id == "A");

    json j = valid_scenario_json();
    std::vector<std::string> pinned(33, "B");
    j["anchor_sequence"] = pinned;
    Scenario sp = scenario_from_json(j);
    CHECK(sp.single_anchor());
    for (const auto& a : sp.schedule_anchors()) CHECK(a.id == "B");
}

TEST_CASE("config violations carry field paths") {
    SUBCASE("missing anchors") {
        json j = valid_scenario_json();
        j.erase("anchors");
        CHECK(has_violation(j, "anchors: expected a non-empty array"));
    }
    SUBCASE("duplicate anchor ids") {
        json j = valid_scenario_json();
        j["anchors"][1]["id"] = "A";
        CHECK(has_violation(j, "anchors[1].id: duplicate"));
    }
    SUBCASE("bad radius") {
        json j = valid_scenario_json();
        j["authorized_region"]["radius_m"] = -1.0;
        CHECK(has_violation(j, "authorized_region.radius_m"));
    }
    SUBCASE("non-finite coordinate rejected by JSON layer or validator") {
        json j = valid_scenario_json();
        j["anchors"][0]["pos"][0] = "oops";
        CHECK(has_violation(j, "anchors[0].pos"));
    }
    SUBCASE("anchor_sequence must have 33 known ids") {
        json j = valid_scenario_json();
        j["anchor_sequence"] = std::vector<std::string>(5, "A");
        CHECK(has_violation(j, "anchor_sequence: expected exactly 33"));

        std::vector<std::string> seq(33, "A");
        seq[7] = "nope";
        j["anchor_sequence"] = seq;
        CHECK(has_violation(j, "anchor_sequence[7]: unknown anchor id"));
    }
    SUBCASE("bad role") {
        json j = valid_scenario_json();
        j["receivers"][0]["role"] = "listener";
        CHECK(has_violation(j, "receivers[0].role"));
    }
    SUBCASE("duplicate receiver ids") {
        json j = valid_scenario_json();
        j["receivers"].push_back(j["receivers"][0]);
        CHECK(has_violation(j, "receivers[1].id: duplicate"));
    }
    SUBCASE("empty password") {
        json j = valid_scenario_json();
        j["password"] = "";
        CHECK(has_violation(j, "password"));
    }
    SUBCASE("negative sigma") {
        json j = valid_scenario_json();
        j["noise"]["sigma_ticks"] = -3.0;
        CHECK(has_violation(j, "noise.sigma_ticks"));
    }
    SUBCASE("unknown top-level field") {
        json j = valid_scenario_json();
        j["paylod_path"] = "typo.bin";
        CHECK(has_violation(j, "paylod_path: unknown field"));
    }
    SUBCASE("slot width override too large for the window") {
        json j = valid_scenario_json();
        j["slot_width_ticks"] = 200'000;
        CHECK(has_violation(j, "slot_width_ticks"));
    }
    SUBCASE("all violations reported at once") {
        json j = valid_scenario_json();
        j["password"] = "";
        j["authorized_region"]["radius_m"] = 0.0;
        j["receivers"][0]["role"] = "x";
        CHECK(violations_of(j).size() >= 3);
    }
}

TEST_CASE("sigma defaults to a tenth of the slot width") {
    json j = valid_scenario_json();
    j.erase("noise");
    Scenario s = scenario_from_json(j);
    CHECK(s.noise.sigma_ticks == doctest::Approx(42.6));
    CHECK(s.noise.seed == 0);
}

TEST_CASE("slot width override wins over the region") {
    json j = valid_scenario_json();
    j["slot_width_ticks"] = 100;
    CHECK(scenario_from_json(j).slot_width().ticks().value == 100);
}

TEST_CASE("digest is stable and sensitive") {
    Scenario a = scenario_from_json(valid_scenario_json());
    Scenario b = scenario_from_json(valid_scenario_json());
    CHECK(a.digest() == b.digest());
    CHECK(a.digest().size() == 16);
    b.password = "different";
    CHECK(a.digest() != b.digest());
}

TEST_CASE("load_scenario applies GEOLOCK_SEED") {
    json j = valid_scenario_json();
    std::string path = "/tmp/geolock_test_scenario.json";
    {
        std::ofstream out(path);
        out << j.dump();
    }
    ::unsetenv("GEOLOCK_SEED");
    CHECK(load_scenario(path).noise.seed == 42);
    ::setenv("GEOLOCK_SEED", "777", 1);
    CHECK(load_scenario(path).noise.seed == 777);
    ::setenv("GEOLOCK_SEED", "bogus", 1);
    CHECK_THROWS_AS(load_scenario(path), ConfigError);
    ::unsetenv("GEOLOCK_SEED");

    CHECK_THROWS_AS(load_scenario("/nonexistent/x.json"), IoError);
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    CHECK_THROWS_AS(load_scenario(path), ConfigError);
}

TEST_CASE("noise samples are reproducible and keyed") {
    NoiseModel n{50.0, 1234};
    CHECK(n.sample("rx", 7).value == n.sample("rx", 7).value);
    NoiseModel same{50.0, 1234};
    CHECK(n.sample("rx", 7).value == same.sample("rx", 7).value);

    // Different seq / receiver / seed give (generically) different samples.
    int distinct = 0;
    for (std::uint32_t seq = 1; seq < 20; ++seq)
        if (n.sample("rx", seq).value != n.sample("rx", seq + 1).value) ++distinct;
    CHECK(distinct > 10);

    NoiseModel zero{0.0, 1234};
    CHECK(zero.sample("rx", 3).value == 0);
}
