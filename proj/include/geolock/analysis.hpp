#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geolock/scenario.hpp"
#include "geolock/simchannel.hpp"

namespace geolock {

struct GapDelta {
    int gap = 0;  // 1..32, indexing the inter-packet difference
    std::string prev_id;
    std::string cur_id;
    TickDelta delta;  // eavesdropper gap minus intended gap, in ticks
};

// Per-gap tick deltas between the intended receiver's timeline and an
// eavesdropper's at `point`. Zero for same-anchor gaps regardless of point.
std::vector<GapDelta> reference_delta(const Scenario& scenario, const Point3& point);

inline constexpr double kFlipScanStepM = 0.01;
inline constexpr double kFlipResolutionM = 0.001;
inline constexpr double kFlipCeilingM = 1000.0;

// Smallest displacement along `direction` (from the authorized center) at
// which the analytic decode no longer matches the true key: a 1 cm scan to
// the first flip, then bisection to 1 mm. nullopt when nothing flips within
// 1 km (single-anchor schedules, or directions orthogonal to every anchor
// baseline).
std::optional<double> min_flip_displacement(const Scenario& scenario, const Point3& direction);

struct DirectionProbe {
    Point3 direction;
    std::optional<double> flip_displacement_m;
};

struct ToleranceReport {
    std::string scenario_digest;
    std::int64_t slot_width_ticks = 0;
    std::int64_t tolerance_ticks = 0;   // slot_width / 2, by the rounding rule
    double tolerance_m = 0;             // same, as a path difference in meters
    int same_anchor_gaps = 0;           // gaps immune to displacement
    std::vector<DirectionProbe> probes;

    std::string to_text() const;
    std::string to_csv() const;
};

ToleranceReport tolerance_report(const Scenario& scenario,
                                 const std::vector<Point3>& directions);

std::string reference_delta_table(const Scenario& scenario, const Point3& point);

}  // namespace geolock
