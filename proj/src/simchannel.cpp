#include "geolock/simchannel.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

#include "geolock/cryptocore.hpp"
#include "geolock/rng.hpp"

namespace geolock {

KeySchedule build_schedule(const Scenario& scenario, NtTicks current_time,
                           const CadenceConfig& cfg) {
    Key256 key = derive_key(scenario.password);
    auto anchors = scenario.schedule_anchors();
    NtTicks t0 = initial_network_cadence(current_time, cfg);
    return schedule_key(key, anchors, scenario.region.center, t0, scenario.slot_width(cfg), cfg);
}

ArrivalTrace deliver(const KeySchedule& schedule, const Receiver& receiver,
                     const NoiseModel& noise) {
    if (!is_finite(receiver.position))
        throw ConfigError("deliver: receiver position must be finite");
    ArrivalTrace trace;
    trace.arrivals.reserve(schedule.entries.size());
    TickDelta walk{0};
    for (std::size_t n = 0; n < schedule.entries.size(); ++n) {
        const ScheduleEntry& e = schedule.entries[n];
        if (n > 0) walk = walk + noise.sample(receiver.id, static_cast<std::uint32_t>(n));
        NtTicks rx = e.tx_time + tof_ticks(e.anchor, receiver.position) + walk;
        trace.arrivals.push_back({static_cast<std::uint32_t>(n), rx});
    }
    return trace;
}

namespace {

ReceiverReport evaluate_receiver(const Scenario& scenario, const KeySchedule& schedule,
                                 const Key256& true_key, const CipherPayload& payload,
                                 std::span<const std::uint8_t> plain, const Receiver& rx) {
    ReceiverReport report;
    report.id = rx.id;
    report.role = rx.role;

    ArrivalTrace trace = deliver(schedule, rx, scenario.noise);
    EavesdropReport eo = eavesdropper_decode(trace, schedule.slot_width, {}, true_key);
    report.slot_delta = eo.slot_delta;
    report.byte_errors = eo.byte_errors;

    auto key = eo.decode.key();
    if (!key) {
        int bad = eo.decode.first_out_of_range();
        report.error = "slot out of range at key byte " + std::to_string(bad) +
                       " (off-region receiver or excessive noise)";
        return report;
    }
    report.key_hex = key->hex();
    try {
        auto decrypted = decrypt(payload, *key);
        report.decrypt_ok = decrypted.size() == plain.size() &&
                            std::equal(decrypted.begin(), decrypted.end(), plain.begin());
        if (!report.decrypt_ok) report.error = "decrypted output does not match the payload";
    } catch (const CryptoError& e) {
        report.error = e.what();
    }
    return report;
}

}  // namespace

ScenarioReport run_scenario(const Scenario& scenario, std::span<const std::uint8_t> payload) {
    KeySchedule schedule = build_schedule(scenario);
    Key256 true_key = derive_key(scenario.password);
    CipherPayload encrypted = encrypt(payload, true_key, derive_iv(scenario.noise.seed, 0));

    ScenarioReport report;
    report.scenario_digest = scenario.digest();
    report.slot_width_ticks = schedule.slot_width.ticks().value;
    report.single_anchor_warning = scenario.single_anchor();
    report.receivers.resize(scenario.receivers.size());

    // Exceptions must not escape the parallel region; surface them per receiver.
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < scenario.receivers.size(); ++i) {
        try {
            report.receivers[i] = evaluate_receiver(scenario, schedule, true_key, encrypted,
                                                    payload, scenario.receivers[i]);
        } catch (const std::exception& e) {
            report.receivers[i].id = scenario.receivers[i].id;
            report.receivers[i].role = scenario.receivers[i].role;
            report.receivers[i].error = e.what();
            report.receivers[i].byte_errors = 32;
        }
    }
    return report;
}

ScenarioReport run_scenario(const Scenario& scenario) {
    if (!scenario.payload_path)
        throw ConfigError("payload_path: required to run a scenario");
    auto payload = read_file(*scenario.payload_path);
    return run_scenario(scenario, payload);
}

bool ScenarioReport::intended_all_ok() const {
    for (const auto& r : receivers)
        if (r.role == Role::intended && !r.decrypt_ok) return false;
    return true;
}

std::string ScenarioReport::to_text() const {
    std::ostringstream out;
    out << "scenario " << scenario_digest << ", slot width " << slot_width_ticks << " ticks\n";
    if (single_anchor_warning)
        out << "warning: single-anchor schedule; every position decodes the key\n";
    for (const auto& r : receivers) {
        out << (r.role == Role::intended ? "intended    " : "eavesdropper") << " " << r.id << ": ";
        if (r.error)
            out << "FAIL (" << *r.error << ")";
        else if (r.decrypt_ok)
            out << "OK";
        if (r.key_hex) out << ", key " << *r.key_hex;
        out << ", byte errors " << r.byte_errors << "\n";
    }
    if (receivers.empty()) out << "(no receivers)\n";
    return out.str();
}

nlohmann::json ScenarioReport::to_json() const {
    nlohmann::json j;
    j["scenario_digest"] = scenario_digest;
    j["slot_width_ticks"] = slot_width_ticks;
    j["single_anchor_warning"] = single_anchor_warning;
    j["receivers"] = nlohmann::json::array();
    for (const auto& r : receivers) {
        nlohmann::json e;
        e["id"] = r.id;
        e["role"] = r.role == Role::intended ? "intended" : "eavesdropper";
        if (r.key_hex) e["recovered_key"] = *r.key_hex;
        if (r.error) e["error"] = *r.error;
        e["byte_errors"] = r.byte_errors;
        e["decrypt_ok"] = r.decrypt_ok;
        e["slot_delta"] = r.slot_delta;
        j["receivers"].push_back(std::move(e));
    }
    return j;
}

std::size_t GridSpec::total() const {
    if (counts[0] < 1 || counts[1] < 1 || counts[2] < 1)
        throw ConfigError("grid counts must all be >= 1");
    return static_cast<std::size_t>(counts[0]) * static_cast<std::size_t>(counts[1]) *
           static_cast<std::size_t>(counts[2]);
}

Point3 GridSpec::point(int ix, int iy, int iz) const {
    auto coord = [](double lo, double hi, int i, int n) {
        return n <= 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    };
    return {coord(min.x, max.x, ix, counts[0]), coord(min.y, max.y, iy, counts[1]),
            coord(min.z, max.z, iz, counts[2])};
}

namespace {

SweepRow sweep_point(const KeySchedule& schedule, const Key256& true_key, const Point3& q) {
    SweepRow row{q, 0, false};
    auto slots = analytic_decode_slots(schedule, q);
    for (int i = 0; i < 32; ++i) {
        std::int64_t decoded = slots[static_cast<std::size_t>(i)];
        if (decoded < 0 || decoded > 255 ||
            decoded != true_key.bytes()[static_cast<std::size_t>(i)])
            ++row.byte_errors;
    }
    row.key_recovered = row.byte_errors == 0;
    return row;
}

template <bool Parallel>
std::vector<SweepRow> sweep_impl(const Scenario& scenario, const GridSpec& grid) {
    if (!is_finite(grid.min) || !is_finite(grid.max))
        throw ConfigError("grid bounds must be finite");
    std::size_t total = grid.total();
    if (total > kMaxGridPoints)
        throw ResourceError("grid of " + std::to_string(total) + " points exceeds the " +
                            std::to_string(kMaxGridPoints) + "-point ceiling");

    KeySchedule schedule = build_schedule(scenario);
    Key256 true_key = derive_key(scenario.password);

    std::vector<SweepRow> rows(total);
    const int ny = grid.counts[1], nz = grid.counts[2];

#pragma omp parallel for schedule(static) if (Parallel)
    for (std::size_t idx = 0; idx < total; ++idx) {
        int ix = static_cast<int>(idx / (static_cast<std::size_t>(ny) * nz));
        int iy = static_cast<int>(idx / nz % ny);
        int iz = static_cast<int>(idx % nz);
        rows[idx] = sweep_point(schedule, true_key, grid.point(ix, iy, iz));
    }
    return rows;
}

}  // namespace

std::vector<SweepRow> spatial_sweep(const Scenario& scenario, const GridSpec& grid) {
    return sweep_impl<true>(scenario, grid);
}

std::vector<SweepRow> spatial_sweep_serial(const Scenario& scenario, const GridSpec& grid) {
    return sweep_impl<false>(scenario, grid);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "x,y,z,byte_errors,key_recovered\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%d,%d\n", r.pos.x, r.pos.y, r.pos.z,
                      r.byte_errors, r.key_recovered ? 1 : 0);
        out << buf;
    }
}

}  // namespace geolock
