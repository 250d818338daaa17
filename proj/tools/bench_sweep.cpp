// Compares the serial reference sweep against the OpenMP kernel on the
// canonical two-anchor scenario and checks they agree row for row.

#include <chrono>
#include <cstdio>

#include "geolock/simchannel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace geolock;

namespace {

Scenario canonical_scenario() {
    Scenario s;
    s.anchors = {{"A", {-5, 0, 0}}, {"B", {5, 0, 0}}};
    s.region = {{0, 0, 0}, 2.0};
    s.password = "bench-password";
    s.noise = {0.0, 1};
    return s;
}

template <typename F>
double time_ms(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled; both runs are serial\n");
#endif

    Scenario scenario = canonical_scenario();
    struct Case {
        const char* name;
        GridSpec grid;
    } cases[] = {
        {"plane 500x500x1", {{-10, -10, 0}, {10, 10, 0}, {500, 500, 1}}},
        {"volume 100x100x100", {{-10, -10, -10}, {10, 10, 10}, {100, 100, 100}}},
    };

    bool all_equal = true;
    for (const auto& c : cases) {
        std::vector<SweepRow> serial, parallel;
        double t_serial = time_ms([&] { serial = spatial_sweep_serial(scenario, c.grid); });
        double t_parallel = time_ms([&] { parallel = spatial_sweep(scenario, c.grid); });

        bool equal = serial.size() == parallel.size();
        for (std::size_t i = 0; equal && i < serial.size(); ++i)
            equal = serial[i].pos == parallel[i].pos &&
                    serial[i].byte_errors == parallel[i].byte_errors &&
                    serial[i].key_recovered == parallel[i].key_recovered;
        all_equal = all_equal && equal;

        std::printf("%-20s %9zu pts  serial %8.1f ms  parallel %8.1f ms  speedup %.2fx  %s\n",
                    c.name, serial.size(), t_serial, t_parallel, t_serial / t_parallel,
                    equal ? "match" : "MISMATCH");
    }
    return all_equal ? 0 : 1;
}
