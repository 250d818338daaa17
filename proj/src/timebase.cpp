#include "geolock/timebase.hpp"

#include <cmath>
#include <limits>

namespace geolock {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out)) throw RangeError("tick addition overflow");
    return out;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_sub_overflow(a, b, &out)) throw RangeError("tick subtraction overflow");
    return out;
}

}  // namespace

NtTicks operator+(NtTicks t, TickDelta d) {
    if (d.value >= 0) {
        std::uint64_t out;
        if (__builtin_add_overflow(t.value, static_cast<std::uint64_t>(d.value), &out))
            throw RangeError("tick addition overflow");
        return NtTicks{out};
    }
    std::uint64_t mag = static_cast<std::uint64_t>(-(d.value + 1)) + 1;
    if (mag > t.value) throw RangeError("tick subtraction below epoch");
    return NtTicks{t.value - mag};
}

NtTicks operator-(NtTicks t, TickDelta d) {
    if (d.value == std::numeric_limits<std::int64_t>::min())
        return t + TickDelta{std::numeric_limits<std::int64_t>::max()} + TickDelta{1};
    return t + TickDelta{-d.value};
}

TickDelta operator-(NtTicks a, NtTicks b) {
    if (a.value >= b.value) {
        std::uint64_t diff = a.value - b.value;
        if (diff > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
            throw RangeError("tick difference overflow");
        return TickDelta{static_cast<std::int64_t>(diff)};
    }
    std::uint64_t diff = b.value - a.value;
    if (diff > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
        throw RangeError("tick difference overflow");
    return TickDelta{-static_cast<std::int64_t>(diff)};
}

TickDelta operator+(TickDelta a, TickDelta b) { return TickDelta{checked_add(a.value, b.value)}; }
TickDelta operator-(TickDelta a, TickDelta b) { return TickDelta{checked_sub(a.value, b.value)}; }

TickDelta operator*(TickDelta d, std::int64_t k) {
    std::int64_t out;
    if (__builtin_mul_overflow(d.value, k, &out)) throw RangeError("tick multiplication overflow");
    return TickDelta{out};
}

CadenceConfig::CadenceConfig(TickDelta window, TickDelta start_offset, TickDelta between_offset)
    : window_ticks(window), start_offset_ticks(start_offset), between_offset_ticks(between_offset) {
    if (between_offset.value <= 0)
        throw ConfigError("cadence.between_offset_ticks: must be positive");
    if (start_offset.value != 2 * between_offset.value)
        throw ConfigError("cadence.start_offset_ticks: must equal 2 x between_offset_ticks");
    if (window.value <= start_offset.value)
        throw ConfigError("cadence.window_ticks: must exceed start_offset_ticks");
}

static_assert(319'488'000LL == 2 * 159'744'000LL, "start offset is twice the between offset");

NtTicks seconds_to_ticks(double seconds) {
    if (!(seconds >= 0.0))
        throw RangeError("seconds_to_ticks: seconds must be nonnegative");
    // double mantissas run out at 2^53 ticks (~1.6 days); 80-bit extended
    // keeps the product exact for anything that fits in 64 bits.
    long double product = static_cast<long double>(seconds) * kTicksPerSecond;
    if (product >= 0x1p63L)
        throw RangeError("seconds_to_ticks: result exceeds 64-bit tick range");
    long double rounded = std::roundl(product);
    return NtTicks{static_cast<std::uint64_t>(static_cast<std::int64_t>(rounded))};
}

double ticks_to_seconds(NtTicks t) {
    return static_cast<double>(static_cast<long double>(t.value) / kTicksPerSecond);
}

double ticks_to_seconds(TickDelta d) {
    return static_cast<double>(static_cast<long double>(d.value) / kTicksPerSecond);
}

NtTicks initial_network_cadence(NtTicks current_time, const CadenceConfig& cfg) {
    std::uint64_t n = current_time.value / static_cast<std::uint64_t>(kTicksPerSecond) + 1;
    std::uint64_t boundary;
    if (__builtin_mul_overflow(n, static_cast<std::uint64_t>(kTicksPerSecond), &boundary))
        throw RangeError("initial_network_cadence: network offset overflow");
    return NtTicks{boundary} + cfg.start_offset_ticks;
}

bool fits_in_window(TickDelta schedule_span, const CadenceConfig& cfg) {
    if (schedule_span.value < 0)
        throw RangeError("fits_in_window: schedule span must be nonnegative");
    return (cfg.start_offset_ticks + schedule_span).value <= cfg.window_ticks.value;
}

std::int64_t round_div_ties_even(std::int64_t num, std::int64_t den) {
    // floor division, then round the remainder; den > 0.
    std::int64_t q = num / den;
    std::int64_t r = num % den;
    if (r < 0) {
        q -= 1;
        r += den;
    }
    std::int64_t rest = den - r;  // compare r against den/2 without overflow
    if (r > rest) return q + 1;
    if (r < rest) return q;
    return (q % 2 == 0) ? q : q + 1;
}

}  // namespace geolock
