#include "geolock/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "geolock/cryptocore.hpp"

namespace geolock {

std::vector<GapDelta> reference_delta(const Scenario& scenario, const Point3& point) {
    auto anchors = scenario.schedule_anchors();
    std::vector<GapDelta> deltas;
    deltas.reserve(32);
    for (int n = 1; n < kKeyPackets; ++n) {
        const Anchor& prev = anchors[static_cast<std::size_t>(n - 1)];
        const Anchor& cur = anchors[static_cast<std::size_t>(n)];
        deltas.push_back(
            {n, prev.id, cur.id, path_difference_shift(prev, cur, scenario.region.center, point)});
    }
    return deltas;
}

namespace {

bool decodes_wrong(const KeySchedule& schedule, const Key256& true_key, const Point3& q) {
    auto slots = analytic_decode_slots(schedule, q);
    for (int i = 0; i < 32; ++i) {
        std::int64_t decoded = slots[static_cast<std::size_t>(i)];
        if (decoded != true_key.bytes()[static_cast<std::size_t>(i)]) return true;
    }
    return false;
}

}  // namespace

std::optional<double> min_flip_displacement(const Scenario& scenario, const Point3& direction) {
    double len = norm(direction);
    if (!(len > 0) || !std::isfinite(len))
        throw ConfigError("direction: must be a non-degenerate finite vector");
    Point3 unit = direction * (1.0 / len);

    KeySchedule schedule = build_schedule(scenario);
    Key256 true_key = derive_key(scenario.password);
    Point3 center = scenario.region.center;

    auto wrong_at = [&](double t) { return decodes_wrong(schedule, true_key, center + unit * t); };

    // Scan outward for the first flipped step, then bisect the bracket.
    double lo = 0.0, hi = 0.0;
    bool found = false;
    for (double t = kFlipScanStepM; t <= kFlipCeilingM; t += kFlipScanStepM) {
        if (wrong_at(t)) {
            hi = t;
            lo = t - kFlipScanStepM;
            found = true;
            break;
        }
    }
    if (!found) return std::nullopt;

    while (hi - lo > kFlipResolutionM) {
        double mid = 0.5 * (lo + hi);
        (wrong_at(mid) ? hi : lo) = mid;
    }
    return hi;
}

ToleranceReport tolerance_report(const Scenario& scenario, const std::vector<Point3>& directions) {
    ToleranceReport report;
    report.scenario_digest = scenario.digest();
    SlotWidth slot = scenario.slot_width();
    report.slot_width_ticks = slot.ticks().value;
    report.tolerance_ticks = slot.ticks().value / 2;
    report.tolerance_m = static_cast<double>(report.tolerance_ticks) * kSpeedOfLightMps /
                         static_cast<double>(kTicksPerSecond);

    auto anchors = scenario.schedule_anchors();
    for (int n = 1; n < kKeyPackets; ++n)
        if (anchors[static_cast<std::size_t>(n - 1)].id == anchors[static_cast<std::size_t>(n)].id)
            ++report.same_anchor_gaps;

    for (const auto& dir : directions)
        report.probes.push_back({dir, min_flip_displacement(scenario, dir)});
    return report;
}

std::string ToleranceReport::to_text() const {
    std::ostringstream out;
    out << "scenario " << scenario_digest << "\n";
    out << "slot width: " << slot_width_ticks << " ticks\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "per-gap decode tolerance: +/-%lld ticks (+/-%.4f m path difference)\n",
                  static_cast<long long>(tolerance_ticks), tolerance_m);
    out << buf;
    out << "same-anchor gaps (immune to displacement): " << same_anchor_gaps << " of 32\n";
    for (const auto& probe : probes) {
        std::snprintf(buf, sizeof(buf), "direction (%g, %g, %g): ", probe.direction.x,
                      probe.direction.y, probe.direction.z);
        out << buf;
        if (probe.flip_displacement_m) {
            std::snprintf(buf, sizeof(buf), "first wrong byte at %.3f m\n",
                          *probe.flip_displacement_m);
            out << buf;
        } else {
            out << "no flip within 1000 m (unbounded)\n";
        }
    }
    return out.str();
}

std::string ToleranceReport::to_csv() const {
    std::ostringstream out;
    out << "dir_x,dir_y,dir_z,flip_displacement_m\n";
    char buf[160];
    for (const auto& probe : probes) {
        if (probe.flip_displacement_m)
            std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.4f\n", probe.direction.x,
                          probe.direction.y, probe.direction.z, *probe.flip_displacement_m);
        else
            std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,unbounded\n", probe.direction.x,
                          probe.direction.y, probe.direction.z);
        out << buf;
    }
    return out.str();
}

std::string reference_delta_table(const Scenario& scenario, const Point3& point) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "reference deltas at (%g, %g, %g):\n", point.x, point.y,
                  point.z);
    out << buf;
    out << "gap  prev  cur   delta_ticks  delta_m      slot_shift\n";
    std::int64_t slot = scenario.slot_width().ticks().value;
    for (const auto& d : reference_delta(scenario, point)) {
        double meters = static_cast<double>(d.delta.value) * kSpeedOfLightMps /
                        static_cast<double>(kTicksPerSecond);
        std::snprintf(buf, sizeof(buf), "%3d  %-5s %-5s %11lld  %11.4f  %10lld\n", d.gap,
                      d.prev_id.c_str(), d.cur_id.c_str(), static_cast<long long>(d.delta.value),
                      meters, static_cast<long long>(round_div_ties_even(d.delta.value, slot)));
        out << buf;
    }
    return out.str();
}

}  // namespace geolock
