#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "geolock/cryptocore.hpp"
#include "geolock/geometry.hpp"
#include "geolock/timebase.hpp"

namespace geolock {

inline constexpr int kKeyPackets = 33;  // 32 key bytes plus the reference packet

struct ScheduleEntry {
    Anchor anchor;
    NtTicks tx_time;
    NtTicks intended_arrival;  // tx_time + tof(anchor, authorized_point)
    std::uint8_t slot = 0;     // key byte carried by this gap; unused on entry 0
};

// 33 scheduled transmissions encoding a 32-byte key. Entry 0 is the timing
// reference; its intended arrival at the authorized point is t0. Every
// consecutive pair of intended arrivals differs by exactly
// between_offset + slot * slot_width.
struct KeySchedule {
    std::vector<ScheduleEntry> entries;
    SlotWidth slot_width;
    Point3 authorized_point;
};

// Transmission side. For n = 1..32:
//   tx(n) = tx(n-1) + tof(anchor(n-1), authorized) + between_offset
//         + slot(n) * slot_width - tof(anchor(n), authorized)
// with slot(n) = key byte n-1, and tx(0) = t0 - tof(anchor(0), authorized)
// so the reference arrives at the authorized point exactly at t0.
KeySchedule schedule_key(const Key256& key, std::span<const Anchor> anchors, Point3 authorized,
                         NtTicks t0, SlotWidth slot_width, const CadenceConfig& cfg = {});

TickDelta schedule_span(const KeySchedule& schedule);

struct Arrival {
    std::uint32_t seq = 0;
    NtTicks rx_time;
};

struct ArrivalTrace {
    std::vector<Arrival> arrivals;
};

// Raw reception-equation output before range validation:
//   slot(n) = round((rx(n) - rx(n-1) - between_offset) / slot_width)
// rounded to nearest, ties to even. Values outside [0,255] mark bytes an
// off-region receiver (or excessive noise) corrupted.
struct SlotDecode {
    std::array<std::int64_t, 32> raw_slots{};

    bool in_range() const;
    int first_out_of_range() const;  // -1 when everything is in range
    std::optional<Key256> key() const;
};

// Sorts by seq and applies the reception equation to the first 33 arrivals.
// Throws IncompleteTraceError when fewer than 33 are present.
SlotDecode decode_slots(const ArrivalTrace& trace, SlotWidth slot_width,
                        const CadenceConfig& cfg = {});

// decode_slots plus range validation; throws SlotRangeError carrying the
// first offending byte index.
Key256 decode_arrivals(const ArrivalTrace& trace, SlotWidth slot_width,
                       const CadenceConfig& cfg = {});

struct EavesdropReport {
    SlotDecode decode;
    std::array<std::int64_t, 32> slot_delta{};  // decoded minus intended, per byte
    std::vector<int> unrecoverable;             // byte indices outside [0,255]
    int byte_errors = 0;                        // mismatched or unrecoverable bytes
};

// Runs the decoder on a trace captured anywhere and reports which bytes
// differ from the intended key and by how many slots.
EavesdropReport eavesdropper_decode(const ArrivalTrace& trace, SlotWidth slot_width,
                                    const CadenceConfig& cfg, const Key256& true_key);

// Zero-noise decode at point q without simulating packets: the decoded slot
// for gap n is round via the same tie rule of
//   slot(n) * slot_width + path_difference_shift(anchor(n-1), anchor(n), authorized, q)
// divided by slot_width. Exactly equal to decoding a simulated zero-noise
// trace captured at q.
std::array<std::int64_t, 32> analytic_decode_slots(const KeySchedule& schedule, const Point3& q);

// Feed arrivals one at a time, in any order; ready once seqs 0..32 have all
// been seen. Single-owner: not meant to be shared across threads.
class IncrementalDecoder {
public:
    explicit IncrementalDecoder(SlotWidth slot_width, const CadenceConfig& cfg = {})
        : slot_width_(slot_width), cfg_(cfg) {}

    // Arrivals with seq > 32 or a seq already seen are ignored.
    void feed(const Arrival& arrival);

    bool ready() const { return seen_ == kKeyPackets; }
    std::size_t arrivals_seen() const { return seen_; }

    SlotDecode decode() const;  // throws IncompleteTraceError until ready
    Key256 key() const;         // also throws SlotRangeError when off-region

private:
    SlotWidth slot_width_;
    CadenceConfig cfg_;
    std::array<NtTicks, kKeyPackets> rx_{};
    std::array<bool, kKeyPackets> have_{};
    std::size_t seen_ = 0;
};

}  // namespace geolock
