#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "geolock/jmtk.hpp"
#include "geolock/scenario.hpp"

namespace geolock {

// Canonical schedule for a scenario: key from the password, anchors from
// the pinned sequence or round-robin, t0 from the initial network cadence
// at the given simulated clock reading.
KeySchedule build_schedule(const Scenario& scenario, NtTicks current_time = NtTicks{0},
                           const CadenceConfig& cfg = {});

// Delivers every scheduled packet to a receiver:
//   rx(n) = tx(n) + tof(anchor(n), receiver) + walk(n)
// where walk accumulates one seeded noise sample per gap, so each decoded
// inter-packet difference sees exactly one independent sample. The
// reference arrival carries no noise. Deterministic given the seed.
ArrivalTrace deliver(const KeySchedule& schedule, const Receiver& receiver,
                     const NoiseModel& noise);

struct ReceiverReport {
    std::string id;
    Role role = Role::intended;
    std::optional<std::string> key_hex;  // recovered key, correct or not
    std::optional<std::string> error;    // decode failure description
    std::array<std::int64_t, 32> slot_delta{};
    int byte_errors = 0;
    bool decrypt_ok = false;
};

struct ScenarioReport {
    std::string scenario_digest;
    std::int64_t slot_width_ticks = 0;
    bool single_anchor_warning = false;
    std::vector<ReceiverReport> receivers;

    bool intended_all_ok() const;
    std::string to_text() const;
    nlohmann::json to_json() const;
};

// Encrypts the payload, builds the schedule, delivers to every receiver,
// decodes, attempts decryption, and reports. Receivers are evaluated in
// parallel; the report order matches the scenario order exactly.
ScenarioReport run_scenario(const Scenario& scenario, std::span<const std::uint8_t> payload);

// Same, reading the payload from scenario.payload_path.
ScenarioReport run_scenario(const Scenario& scenario);

struct GridSpec {
    Point3 min;
    Point3 max;
    std::array<int, 3> counts{1, 1, 1};

    std::size_t total() const;
    Point3 point(int ix, int iy, int iz) const;
};

struct SweepRow {
    Point3 pos;
    int byte_errors = 0;
    bool key_recovered = false;
};

inline constexpr std::size_t kMaxGridPoints = 1'000'000;

// Zero-noise analytic decode at every grid point, row-major (x slowest,
// z fastest). OpenMP-parallel; byte-identical to the serial reference.
std::vector<SweepRow> spatial_sweep(const Scenario& scenario, const GridSpec& grid);
std::vector<SweepRow> spatial_sweep_serial(const Scenario& scenario, const GridSpec& grid);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace geolock
