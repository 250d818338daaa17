#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace geolock {

// Counter-based deterministic randomness. Every consumer derives its values
// from (seed, label, counter) so repeated runs reproduce bit-identical
// streams without shared generator state.

std::uint64_t splitmix64(std::uint64_t& state);

// 64-bit FNV-1a, used to fold string labels into stream keys.
std::uint64_t fnv1a64(std::string_view s);

// Stream key for (seed, label, counter).
std::uint64_t stream_key(std::uint64_t seed, std::string_view label, std::uint64_t counter);

// Uniform in (0,1), exclusive on both ends.
double uniform01(std::uint64_t& state);

// Unit normal via Box-Muller on the splitmix stream keyed by `key`.
double standard_normal(std::uint64_t key);

// Deterministic 16-byte IV for (seed, counter). Integer-only, so it is
// bit-identical across platforms.
std::array<std::uint8_t, 16> derive_iv(std::uint64_t seed, std::uint64_t counter);

}  // namespace geolock
