#pragma once

#include <string>

#include "geolock/timebase.hpp"

namespace geolock {

inline constexpr double kSpeedOfLightMps = 299'792'458.0;

struct Point3 {
    double x = 0, y = 0, z = 0;
    friend constexpr bool operator==(const Point3&, const Point3&) = default;
};

bool is_finite(const Point3& p);
double distance_m(const Point3& a, const Point3& b);
double norm(const Point3& p);
Point3 operator+(const Point3& a, const Point3& b);
Point3 operator-(const Point3& a, const Point3& b);
Point3 operator*(const Point3& p, double k);

// Fixed transmitter at a known position.
struct Anchor {
    std::string id;
    Point3 position;
};

// Spherical region around the intended receiver inside which key
// reconstruction succeeds.
struct AuthorizedRegion {
    Point3 center;
    double radius_m = 0;
};

// Width of one key-byte slot in ticks. One slot step encodes an increment
// of 1 in a key byte.
class SlotWidth {
public:
    explicit SlotWidth(TickDelta ticks) : ticks_(ticks) {
        if (ticks.value < 1) throw ConfigError("slot_width: must be at least 1 tick");
    }
    TickDelta ticks() const { return ticks_; }

private:
    TickDelta ticks_;
};

// One-way time of flight from an anchor to a point, rounded to the nearest
// tick once per pair. Downstream arithmetic is integer-exact.
TickDelta tof_ticks(const Anchor& anchor, const Point3& point);

// T_slot = radius / c, converted to ticks, minimum 1 tick. Errors if the
// worst-case all-0xFF schedule would not fit the window.
SlotWidth slot_width_from_region(const AuthorizedRegion& region, const CadenceConfig& cfg = {});

// Worst-case span of a 33-packet schedule (every byte 0xFF, equidistant
// anchors): 32 * (between_offset + 255 * slot).
TickDelta worst_case_span(const SlotWidth& slot, const CadenceConfig& cfg = {});

// The shift an off-region receiver at `actual` sees in one inter-packet
// difference, relative to a receiver at `authorized`:
//   [tof(cur, actual) - tof(cur, authorized)]
// - [tof(prev, actual) - tof(prev, authorized)]
// Zero whenever actual == authorized or prev and cur are the same anchor.
TickDelta path_difference_shift(const Anchor& anchor_prev, const Anchor& anchor_cur,
                                const Point3& authorized, const Point3& actual);

}  // namespace geolock
