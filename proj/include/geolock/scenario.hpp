#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "geolock/geometry.hpp"
#include "geolock/timebase.hpp"

namespace geolock {

enum class Role { intended, eavesdropper };

struct Receiver {
    std::string id;
    Point3 position;
    Role role = Role::intended;
};

// Reception-side timing noise: one seeded sample per inter-packet gap,
// sigma in ticks. Samples are reproducible given (seed, receiver id, seq).
struct NoiseModel {
    double sigma_ticks = 0.0;
    std::uint64_t seed = 0;

    TickDelta sample(std::string_view receiver_id, std::uint32_t seq) const;
};

// Full simulation configuration. Field names are part of the external
// contract; see README for the JSON schema.
struct Scenario {
    std::vector<Anchor> anchors;
    AuthorizedRegion region;
    std::optional<std::vector<std::string>> anchor_sequence;  // 33 ids when present
    std::vector<Receiver> receivers;
    std::string password;
    NoiseModel noise;
    std::optional<std::string> payload_path;
    std::optional<std::int64_t> slot_width_ticks;  // override; derived from region otherwise

    SlotWidth slot_width(const CadenceConfig& cfg = {}) const;

    // The 33 anchors used for the schedule: the pinned anchor_sequence when
    // present, round-robin over `anchors` otherwise.
    std::vector<Anchor> schedule_anchors() const;

    bool single_anchor() const;  // every schedule slot served by one anchor

    nlohmann::json to_json() const;

    // SHA-256 of the canonical JSON form, first 16 hex digits.
    std::string digest() const;
};

// Parses and validates; throws ConfigError carrying every violation with
// its field path.
Scenario scenario_from_json(const nlohmann::json& j);

// Reads, parses, validates. GEOLOCK_SEED in the environment overrides the
// scenario's noise seed.
Scenario load_scenario(const std::string& path);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace geolock
