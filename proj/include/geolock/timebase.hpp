#pragma once

#include <compare>
#include <cstdint>

#include "geolock/errors.hpp"

namespace geolock {

// Conversion factor from seconds to NT ticks: the arithmetic product
// 975000 * 65536. One tick is ~15.65 ps.
inline constexpr std::int64_t kTicksPerSecond = 975'000LL * 65'536LL;
static_assert(kTicksPerSecond == 63'897'600'000LL);

// Absolute network time, in NT ticks since the network epoch.
struct NtTicks {
    std::uint64_t value = 0;
    friend constexpr auto operator<=>(NtTicks, NtTicks) = default;
};

// Signed difference between two NtTicks. Negative values are legal; the
// transmission equation subtracts time-of-flight pre-compensations.
struct TickDelta {
    std::int64_t value = 0;
    friend constexpr auto operator<=>(TickDelta, TickDelta) = default;
};

// Checked tick arithmetic. Overflow never wraps; it throws RangeError,
// since a silent wrap would corrupt key decoding undetectably.
NtTicks operator+(NtTicks t, TickDelta d);
NtTicks operator-(NtTicks t, TickDelta d);
TickDelta operator-(NtTicks a, NtTicks b);
TickDelta operator+(TickDelta a, TickDelta b);
TickDelta operator-(TickDelta a, TickDelta b);
TickDelta operator*(TickDelta d, std::int64_t k);

// Fixed protocol cadence: the 100 ms synchronization window, the 5 ms
// start offset, and the 2.5 ms inter-packet gap.
class CadenceConfig {
public:
    CadenceConfig() = default;
    CadenceConfig(TickDelta window, TickDelta start_offset, TickDelta between_offset);

    TickDelta window_ticks{6'389'760'000LL};        // 100 ms
    TickDelta start_offset_ticks{319'488'000LL};    // 5 ms
    TickDelta between_offset_ticks{159'744'000LL};  // 2.5 ms
};

// round(seconds * K_f). Computed in extended precision so the roundtrip
// through ticks stays within half a tick for seconds up to 1e6.
NtTicks seconds_to_ticks(double seconds);

double ticks_to_seconds(NtTicks t);
double ticks_to_seconds(TickDelta d);

// The next whole-K_f boundary strictly after current_time, plus the start
// offset: the reference instant at which a key transfer begins. Always
// strictly greater than current_time.
NtTicks initial_network_cadence(NtTicks current_time, const CadenceConfig& cfg = {});

// True iff a schedule spanning schedule_span ticks fits in one
// synchronization window after the start offset.
bool fits_in_window(TickDelta schedule_span, const CadenceConfig& cfg = {});

// num/den rounded to the nearest integer, ties to even. den > 0.
std::int64_t round_div_ties_even(std::int64_t num, std::int64_t den);

}  // namespace geolock
