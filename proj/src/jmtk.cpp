#include "geolock/jmtk.hpp"

#include <algorithm>

namespace geolock {

KeySchedule schedule_key(const Key256& key, std::span<const Anchor> anchors, Point3 authorized,
                         NtTicks t0, SlotWidth slot_width, const CadenceConfig& cfg) {
    if (anchors.size() != kKeyPackets)
        throw ConfigError("schedule_key: need exactly 33 anchors, got " +
                          std::to_string(anchors.size()));
    if (!is_finite(authorized))
        throw ConfigError("schedule_key: authorized point must be finite");

    KeySchedule schedule{{}, slot_width, authorized};
    schedule.entries.reserve(kKeyPackets);

    TickDelta tof_prev = tof_ticks(anchors[0], authorized);
    NtTicks tx = t0 - tof_prev;
    schedule.entries.push_back({anchors[0], tx, tx + tof_prev, 0});

    for (int n = 1; n < kKeyPackets; ++n) {
        std::uint8_t slot = key.bytes()[static_cast<std::size_t>(n - 1)];
        TickDelta tof_cur = tof_ticks(anchors[n], authorized);
        tx = tx + tof_prev + cfg.between_offset_ticks + slot_width.ticks() * slot - tof_cur;
        NtTicks arrival = tx + tof_cur;
        if (arrival <= schedule.entries.back().intended_arrival)
            throw RangeError("schedule_key: non-increasing arrival times");
        schedule.entries.push_back({anchors[n], tx, arrival, slot});
        tof_prev = tof_cur;
    }

    if (!fits_in_window(schedule_span(schedule), cfg))
        throw ConfigError("schedule_key: schedule does not fit the 100 ms window");
    return schedule;
}

TickDelta schedule_span(const KeySchedule& schedule) {
    return schedule.entries.back().tx_time - schedule.entries.front().tx_time;
}

bool SlotDecode::in_range() const { return first_out_of_range() < 0; }

int SlotDecode::first_out_of_range() const {
    for (int i = 0; i < 32; ++i)
        if (raw_slots[static_cast<std::size_t>(i)] < 0 ||
            raw_slots[static_cast<std::size_t>(i)] > 255)
            return i;
    return -1;
}

std::optional<Key256> SlotDecode::key() const {
    if (!in_range()) return std::nullopt;
    std::array<std::uint8_t, 32> bytes{};
    for (int i = 0; i < 32; ++i)
        bytes[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>(raw_slots[static_cast<std::size_t>(i)]);
    return Key256{bytes};
}

SlotDecode decode_slots(const ArrivalTrace& trace, SlotWidth slot_width,
                        const CadenceConfig& cfg) {
    if (trace.arrivals.size() < kKeyPackets)
        throw IncompleteTraceError(trace.arrivals.size());

    std::vector<Arrival> sorted(trace.arrivals.begin(), trace.arrivals.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const Arrival& a, const Arrival& b) { return a.seq < b.seq; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].seq == sorted[i - 1].seq)
            throw ConfigError("decode_slots: duplicate seq " + std::to_string(sorted[i].seq));

    SlotDecode out;
    for (int n = 1; n < kKeyPackets; ++n) {
        TickDelta gap = sorted[static_cast<std::size_t>(n)].rx_time -
                        sorted[static_cast<std::size_t>(n - 1)].rx_time;
        TickDelta num = gap - cfg.between_offset_ticks;
        out.raw_slots[static_cast<std::size_t>(n - 1)] =
            round_div_ties_even(num.value, slot_width.ticks().value);
    }
    return out;
}

Key256 decode_arrivals(const ArrivalTrace& trace, SlotWidth slot_width, const CadenceConfig& cfg) {
    SlotDecode decoded = decode_slots(trace, slot_width, cfg);
    int bad = decoded.first_out_of_range();
    if (bad >= 0) throw SlotRangeError(bad, decoded.raw_slots[static_cast<std::size_t>(bad)]);
    return *decoded.key();
}

EavesdropReport eavesdropper_decode(const ArrivalTrace& trace, SlotWidth slot_width,
                                    const CadenceConfig& cfg, const Key256& true_key) {
    EavesdropReport report{decode_slots(trace, slot_width, cfg), {}, {}, 0};
    for (int i = 0; i < 32; ++i) {
        std::int64_t decoded = report.decode.raw_slots[static_cast<std::size_t>(i)];
        std::int64_t intended = true_key.bytes()[static_cast<std::size_t>(i)];
        report.slot_delta[static_cast<std::size_t>(i)] = decoded - intended;
        bool bad_range = decoded < 0 || decoded > 255;
        if (bad_range) report.unrecoverable.push_back(i);
        if (bad_range || decoded != intended) ++report.byte_errors;
    }
    return report;
}

void IncrementalDecoder::feed(const Arrival& arrival) {
    if (arrival.seq >= kKeyPackets) return;
    if (have_[arrival.seq]) return;
    have_[arrival.seq] = true;
    rx_[arrival.seq] = arrival.rx_time;
    ++seen_;
}

SlotDecode IncrementalDecoder::decode() const {
    if (!ready()) throw IncompleteTraceError(seen_);
    SlotDecode out;
    for (int n = 1; n < kKeyPackets; ++n) {
        TickDelta num = (rx_[static_cast<std::size_t>(n)] - rx_[static_cast<std::size_t>(n - 1)]) -
                        cfg_.between_offset_ticks;
        out.raw_slots[static_cast<std::size_t>(n - 1)] =
            round_div_ties_even(num.value, slot_width_.ticks().value);
    }
    return out;
}

Key256 IncrementalDecoder::key() const {
    SlotDecode decoded = decode();
    int bad = decoded.first_out_of_range();
    if (bad >= 0) throw SlotRangeError(bad, decoded.raw_slots[static_cast<std::size_t>(bad)]);
    return *decoded.key();
}

std::array<std::int64_t, 32> analytic_decode_slots(const KeySchedule& schedule, const Point3& q) {
    std::array<std::int64_t, 32> out{};
    const std::int64_t width = schedule.slot_width.ticks().value;

    // tof(anchor(n), authorized) is already frozen in the schedule as
    // intended_arrival - tx_time; only the tofs to q need computing.
    std::array<std::int64_t, kKeyPackets> excess{};
    for (int n = 0; n < kKeyPackets; ++n) {
        const ScheduleEntry& e = schedule.entries[static_cast<std::size_t>(n)];
        TickDelta tof_authorized = e.intended_arrival - e.tx_time;
        excess[static_cast<std::size_t>(n)] =
            (tof_ticks(e.anchor, q) - tof_authorized).value;
    }

    for (int n = 1; n < kKeyPackets; ++n) {
        const ScheduleEntry& cur = schedule.entries[static_cast<std::size_t>(n)];
        std::int64_t shift =
            excess[static_cast<std::size_t>(n)] - excess[static_cast<std::size_t>(n - 1)];
        std::int64_t num = static_cast<std::int64_t>(cur.slot) * width + shift;
        out[static_cast<std::size_t>(n - 1)] = round_div_ties_even(num, width);
    }
    return out;
}

}  // namespace geolock
