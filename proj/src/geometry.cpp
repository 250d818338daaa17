#include "geolock/geometry.hpp"

#include <cmath>

namespace geolock {

bool is_finite(const Point3& p) {
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

double distance_m(const Point3& a, const Point3& b) {
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

double norm(const Point3& p) { return std::hypot(p.x, p.y, p.z); }

Point3 operator+(const Point3& a, const Point3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Point3 operator-(const Point3& a, const Point3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Point3 operator*(const Point3& p, double k) { return {p.x * k, p.y * k, p.z * k}; }

TickDelta tof_ticks(const Anchor& anchor, const Point3& point) {
    long double seconds = static_cast<long double>(distance_m(anchor.position, point)) /
                          static_cast<long double>(kSpeedOfLightMps);
    long double product = seconds * kTicksPerSecond;
    if (!(product < 0x1p63L)) throw RangeError("tof_ticks: distance exceeds tick range");
    return TickDelta{static_cast<std::int64_t>(std::llroundl(product))};
}

SlotWidth slot_width_from_region(const AuthorizedRegion& region, const CadenceConfig& cfg) {
    if (!(region.radius_m > 0) || !std::isfinite(region.radius_m))
        throw ConfigError("authorized_region.radius_m: must be positive and finite");
    NtTicks raw = seconds_to_ticks(region.radius_m / kSpeedOfLightMps);
    std::int64_t ticks = static_cast<std::int64_t>(raw.value);
    if (ticks < 1) ticks = 1;
    SlotWidth slot{TickDelta{ticks}};
    if (!fits_in_window(worst_case_span(slot, cfg), cfg))
        throw ConfigError("authorized_region.radius_m: derived slot width of " +
                          std::to_string(ticks) +
                          " ticks makes the worst-case schedule exceed the time window");
    return slot;
}

TickDelta worst_case_span(const SlotWidth& slot, const CadenceConfig& cfg) {
    return (cfg.between_offset_ticks + slot.ticks() * 255) * 32;
}

TickDelta path_difference_shift(const Anchor& anchor_prev, const Anchor& anchor_cur,
                                const Point3& authorized, const Point3& actual) {
    TickDelta cur = tof_ticks(anchor_cur, actual) - tof_ticks(anchor_cur, authorized);
    TickDelta prev = tof_ticks(anchor_prev, actual) - tof_ticks(anchor_prev, authorized);
    return cur - prev;
}

}  // namespace geolock
