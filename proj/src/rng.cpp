#include "geolock/rng.hpp"

#include <cmath>
#include <numbers>

namespace geolock {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t stream_key(std::uint64_t seed, std::string_view label, std::uint64_t counter) {
    std::uint64_t state = seed;
    std::uint64_t a = splitmix64(state);
    state = a ^ fnv1a64(label);
    std::uint64_t b = splitmix64(state);
    state = b ^ counter;
    return splitmix64(state);
}

double uniform01(std::uint64_t& state) {
    return (static_cast<double>(splitmix64(state) >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(std::uint64_t key) {
    std::uint64_t state = key;
    double u1 = uniform01(state);
    double u2 = uniform01(state);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::array<std::uint8_t, 16> derive_iv(std::uint64_t seed, std::uint64_t counter) {
    std::array<std::uint8_t, 16> iv{};
    for (int half = 0; half < 2; ++half) {
        std::uint64_t word = stream_key(seed, "iv", counter * 2 + static_cast<std::uint64_t>(half));
        for (int i = 0; i < 8; ++i)
            iv[static_cast<std::size_t>(half * 8 + i)] =
                static_cast<std::uint8_t>(word >> (56 - 8 * i));
    }
    return iv;
}

}  // namespace geolock
